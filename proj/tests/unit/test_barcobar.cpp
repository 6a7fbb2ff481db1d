#include "doctest.h"

#include "opdual/barcobar.hpp"

using namespace opdual;

namespace {

Field F2;
Field Q = Field::rationals();

Tree T(const char* s) { return parse_tree(s); }

std::string first(const std::vector<std::string>& v) { return v.empty() ? "" : v.front(); }

using Table = std::map<int, int>;

std::vector<Matrix> identities(const SymSeq& a) {
    std::vector<Matrix> out(a.max_arity() + 1);
    for (int n = 1; n <= a.max_arity(); ++n) out[n] = Matrix::identity(a.term(n)->dim());
    return out;
}

SymSeq binary(const Field& F, int N, int degree = 0) {
    return symseq_from_terms(F, N, {{2, ChainComplex(F, {degree}, Matrix(1, 1))}});
}

bool invertible(const Field& F, const Matrix& m) { return m.rows() == m.cols() && rank(F, m) == m.rows(); }

} // namespace

TEST_SUITE("barcobar") {

TEST_CASE("bar construction dimensions and homology") {
    auto com = builtin_operad("com", Q, 4);
    auto b = bar_construction(com);
    CHECK(b->coop->term(3)->dims() == Table{{1, 1}, {2, 3}});
    CHECK(homology_table(*b->coop->term(3)) == Table{{2, 2}});
    CHECK(b->coop->term(4)->dims() == Table{{1, 1}, {2, 10}, {3, 15}});
    CHECK(homology_table(*b->coop->term(4)) == Table{{3, 6}});
    auto ass = bar_construction(builtin_operad("ass", Q, 3));
    CHECK(ass->coop->term(3)->dims() == Table{{1, 6}, {2, 12}});
    CHECK(homology_table(*ass->coop->term(3)) == Table{{2, 6}});
}

TEST_CASE("bar constructions are cooperads") {
    for (const char* name : {"com", "ass"}) {
        auto b = bar_construction(builtin_operad(name, Q, 4));
        CHECK_MESSAGE(first(check_cooperad_axioms(*b->coop)) == "", name);
    }
    auto b2 = bar_construction(builtin_operad("com", F2, 4));
    CHECK(first(check_cooperad_axioms(*b2->coop)) == "");
}

TEST_CASE("closed forms agree with the coend and end engines") {
    for (const char* name : {"com", "ass"}) {
        auto p = builtin_operad(name, Q, 4);
        auto b = bar_construction(p);
        auto w = w_construction(p);
        auto cb = cobar_construction(extend_cooperad(b->coop));
        for (int n = 2; n <= 4; ++n) {
            auto r1 = compare_coend(Q, b->cubes[n], b->coeffs(n));
            CHECK_MESSAGE(r1.ok, name, " bar ", n, ": ", r1.detail);
            auto r2 = compare_coend(Q, w->cubes[n], w->coeffs(n));
            CHECK_MESSAGE(r2.ok, name, " W ", n, ": ", r2.detail);
            auto r3 = compare_end(Q, cb->cubes[n], cb->coeffs(n));
            CHECK_MESSAGE(r3.ok, name, " cobar ", n, ": ", r3.detail);
        }
        for (int n = 2; n <= 3; ++n) {
            CHECK(compare_relation_sets(Q, b->cubes[n].diagram(), b->coeffs(n), false).ok);
            CHECK(compare_relation_sets(Q, w->cubes[n].diagram(), w->coeffs(n), false).ok);
            CHECK(compare_relation_sets(Q, cb->cubes[n].diagram(), cb->coeffs(n), true).ok);
            CHECK(compare_coend(Q, w->cubes[n], w->coeffs(n), true).ok);
        }
    }
}

TEST_CASE("diagram functoriality is checked") {
    auto com = builtin_operad("com", Q, 4);
    auto b = bar_construction(com);
    CHECK_NOTHROW(check_diagram(Q, b->cubes[4].diagram()));
    CHECK_NOTHROW(check_diagram(Q, b->coeffs(4)));
    Diagram four = b->coeffs(4);
    four.map = [good4 = four.map](const Tree& s, const Tree& t) {
        Matrix m = good4(s, t);
        if (s.vertices() == 1 && t.vertices() == 3) m = Matrix(m.rows(), m.cols());
        return m;
    };
    CHECK_THROWS_AS(check_diagram(Q, four), OperadError);
}

TEST_CASE("W construction") {
    auto com = builtin_operad("com", Q, 4);
    auto w = w_construction(com);
    CHECK(w->op->term(3)->dims() == Table{{0, 4}, {1, 3}});
    CHECK(first(check_operad_axioms(*w->op)) == "");
    auto ass = w_construction(builtin_operad("ass", Q, 4));
    CHECK(ass->op->term(3)->dims() == Table{{0, 18}, {1, 12}});
    CHECK(first(check_operad_axioms(*ass->op)) == "");
    for (const auto& wp : {w, ass}) {
        auto eta = w_eta(*wp), zeta = w_zeta(*wp);
        std::string why;
        CHECK_MESSAGE(is_operad_map(*wp->op, *wp->p, eta, &why), why);
        CHECK(is_symseq_map(wp->p->seq, wp->op->seq, zeta, &why));
        CHECK_FALSE(is_operad_map(*wp->p, *wp->op, zeta));
        for (int n = 1; n <= 4; ++n) {
            CHECK(equal(Q, mul(Q, eta[n], zeta[n]), Matrix::identity(wp->p->term(n)->dim())));
            CHECK(is_quasi_iso(make_map(wp->op->term(n), wp->p->term(n), eta[n])));
        }
    }
}

TEST_CASE("cobar construction") {
    auto com = builtin_operad("com", Q, 4);
    auto cb = cobar_construction(extend_cooperad(dualize(*com)));
    CHECK(cb->op->term(2)->dims() == Table{{-1, 1}});
    CHECK(first(check_operad_axioms(*cb->op)) == "");
    auto b = bar_construction(com);
    auto cbb = cobar_construction(extend_cooperad(b->coop));
    CHECK(cbb->op->term(3)->dims() == Table{{0, 4}, {1, 3}});
    CHECK(first(check_operad_axioms(*cbb->op)) == "");
}

TEST_CASE("theta is an isomorphism of operads") {
    std::vector<OperadPtr> ps = {builtin_operad("com", Q, 4), builtin_operad("ass", Q, 4),
                                 trivial_operad(binary(Q, 4)), free_operad(binary(Q, 4), 4)};
    for (const auto& p : ps) {
        auto tb = theta_bundle(p);
        std::string why;
        for (int n = 1; n <= 4; ++n)
            CHECK_MESSAGE(check_map(make_map(tb.w->op->term(n), tb.cobar->op->term(n), tb.theta[n], 0, false)) == "",
                          p->name, " chain ", n);
        CHECK_MESSAGE(is_operad_map(*tb.w->op, *tb.cobar->op, tb.theta, &why), p->name, ": ", why);
        for (int n = 1; n <= 4; ++n) CHECK_MESSAGE(invertible(Q, tb.theta[n]), p->name, " arity ", n);
    }
}

TEST_CASE("epsilon theta zeta is r sharp") {
    auto a = binary(Q, 4, 1);
    auto p = trivial_operad(a);
    auto tb = theta_bundle(p);
    auto os = omega_sigma(a);
    auto eps = epsilon_trivial(*tb.bar, *tb.cobar, *os);
    auto zeta = w_zeta(*tb.w);
    auto r = r_sharp(a);
    std::string why;
    CHECK_MESSAGE(is_operad_map(*tb.cobar->op, *os, eps, &why), why);
    CHECK(is_operad_map(*p, *os, r, &why));
    for (int n = 1; n <= 4; ++n) {
        CHECK(equal(Q, mul(Q, eps[n], mul(Q, tb.theta[n], zeta[n])), r[n]));
        CHECK(is_quasi_iso(make_map(tb.cobar->op->term(n), os->term(n), eps[n])));
    }
}

TEST_CASE("degraft inverts grafting") {
    for (int m = 2; m <= 3; ++m)
        for (int n = 2; m + n - 1 <= 5; ++n)
            for (const Tree& t : enumerate_trees(m))
                for (const Tree& u : enumerate_trees(n))
                    for (int i = 1; i <= m; ++i) {
                        auto d = degraft(graft(t, i, u), i, n);
                        REQUIRE(d);
                        CHECK(d->t == t);
                        CHECK(d->u == u);
                    }
    CHECK_FALSE(degraft(T("((1 3) 2)"), 1, 2));
}

TEST_CASE("multiply along a tree") {
    auto b = bar_construction(builtin_operad("com", Q, 4));
    auto q = extend_cooperad(b->coop);
    Tree u = T("(((1 2) 3) 4)");
    CHECK(equal(Q, multiply_along(*q, u, Tree::corolla(4)), Matrix::identity(q->at(u)->dim())));
    CHECK(equal(Q, multiply_along(*q, u, u), Matrix::identity(q->at(u)->dim())));
    Tree v = T("((1 2) 3 4)");
    CHECK(rank(Q, multiply_along(*q, u, v)) == q->at(u)->dim());
}


TEST_CASE("bar and cobar preserve quasi-isomorphisms") {
    auto com = builtin_operad("com", Q, 3);
    auto w = w_construction(com);
    auto eta = w_eta(*w);
    auto bw = bar_construction(w->op), bc = bar_construction(com);
    auto beta = bar_map(*bw, *bc, eta);
    std::string why;
    CHECK_MESSAGE(is_cooperad_map(*bw->coop, *bc->coop, beta, &why), why);
    for (int n = 1; n <= 3; ++n) {
        auto f = make_map(bw->coop->term(n), bc->coop->term(n), beta[n], 0, false);
        CHECK(check_map(f) == "");
        CHECK(is_quasi_iso(f));
    }
    CHECK(bw->coop->term(3)->dims() == Table{{1, 4}, {2, 6}});

    auto cw = cobar_construction(extend_cooperad(bw->coop));
    auto cc = cobar_construction(extend_cooperad(bc->coop));
    auto ceta = cobar_map(*cw, *cc, [&](const Tree& t) {
        std::vector<Matrix> fs;
        for (int v = 0; v < t.vertices(); ++v) fs.push_back(beta[t.valence(v)]);
        return fs.empty() ? Matrix::identity(1) : kron_all(Q, fs);
    });
    CHECK_MESSAGE(is_operad_map(*cw->op, *cc->op, ceta, &why), why);
    for (int n = 1; n <= 3; ++n) CHECK(is_quasi_iso(make_map(cw->op->term(n), cc->op->term(n), ceta[n])));
}

TEST_CASE("W and CB commute with truncation below the cut") {
    for (const char* name : {"com", "ass"}) {
        auto p = builtin_operad(name, Q, 4);
        for (int n = 2; n <= 3; ++n) {
            auto pt = truncate(*p, n, TruncMode::AtMost);
            auto w = w_construction(p), wt = w_construction(pt);
            auto tb = theta_bundle(p), tt = theta_bundle(pt);
            for (int m = 1; m <= n; ++m) {
                CHECK(wt->op->term(m)->degrees() == w->op->term(m)->degrees());
                CHECK(equal(Q, wt->op->term(m)->d(), w->op->term(m)->d()));
                CHECK(tt.cobar->op->term(m)->degrees() == tb.cobar->op->term(m)->degrees());
                CHECK(equal(Q, tt.cobar->op->term(m)->d(), tb.cobar->op->term(m)->d()));
                CHECK(equal(Q, tt.theta[m], tb.theta[m]));
            }
            for (int a = 2; a <= n; ++a)
                for (int b = 2; a + b - 1 <= n; ++b)
                    for (int i = 1; i <= a; ++i) {
                        CHECK(equal(Q, wt->op->circ_at(a, b, i), w->op->circ_at(a, b, i)));
                        CHECK(equal(Q, tt.cobar->op->circ_at(a, b, i), tb.cobar->op->circ_at(a, b, i)));
                    }
        }
    }
}

}
