// One PASS/FAIL line per acceptance criterion. Everything is exact arithmetic;
// the only tolerances are the wall-clock limits below.
#include "opdual/koszul.hpp"

#include <chrono>
#include <cstdio>
#include <cstring>
#include <functional>
#include <sstream>

using namespace opdual;

namespace {

constexpr double kCriterionSeconds = 120.0;
constexpr double kCensusSixSeconds = 10.0;
constexpr double kBarFiveSeconds = 300.0;

Field Q = Field::rationals();
Field F2;

using Table = std::map<int, int>;

struct Outcome {
    bool pass = true;
    std::ostringstream note;
    void require(bool ok, const std::string& what) {
        if (!ok) {
            if (pass) note << "failed: ";
            else note << "; ";
            note << what;
            pass = false;
        }
    }
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

SymSeq generators(const Field& F, int N, std::vector<int> degs) {
    int d = static_cast<int>(degs.size());
    return symseq_from_terms(F, N, {{2, ChainComplex(F, degs, Matrix(d, d))}});
}

bool invertible(const Field& F, const Matrix& m) { return m.rows() == m.cols() && rank(F, m) == m.rows(); }

int euler(const Table& t) {
    int e = 0;
    for (auto [d, k] : t) e += (d % 2 == 0) ? k : -k;
    return e;
}

std::string table_str(const Table& t) {
    std::string s = "{";
    for (auto [d, k] : t) s += (s.size() > 1 ? "," : "") + std::to_string(d) + ":" + std::to_string(k);
    return s + "}";
}

bool same(const Field& F, const PreMap& a, const PreMap& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, m] : a) {
        auto it = b.find(k);
        if (it == b.end() || !equal(F, m, it->second)) return false;
    }
    return true;
}

// ---- criteria -------------------------------------------------------------

void census(Outcome& o) {
    auto oracle = total_partition_counts(6);
    std::vector<long> expect = {0, 1, 1, 4, 26, 236};
    for (int n = 1; n <= 5; ++n) {
        o.require(tree_count(n) == expect[n], "count " + std::to_string(n));
        o.require(oracle[n] == expect[n], "oracle " + std::to_string(n));
    }
    auto t0 = std::chrono::steady_clock::now();
    long six = tree_count(6);
    double s = seconds_since(t0);
    o.require(six == 2752 && oracle[6] == 2752, "arity 6 count");
    o.require(s < kCensusSixSeconds, "arity 6 too slow");
    o.note << "1,1,4,26,236; arity 6 = " << six << " in " << s << "s";
}

// H concentrated in degree n-1 with the given dims, plus the Euler check.
void bar_homology(Outcome& o, const std::string& name, const Field& F, const std::vector<int>& dims) {
    auto b = bar_construction(builtin_operad(name, F, static_cast<int>(dims.size()) + 1));
    for (int n = 2; n <= static_cast<int>(dims.size()) + 1; ++n) {
        const auto& c = *b->coop->term(n);
        Table h = homology_table(c);
        int sign = (n - 1) % 2 == 0 ? 1 : -1;
        o.require(h == Table{{n - 1, dims[n - 2]}}, name + " " + F.name() + " H(" + std::to_string(n) + ") = " + table_str(h));
        o.require(euler(c.dims()) == sign * dims[n - 2], name + " Euler " + std::to_string(n));
    }
}

void bar_com(Outcome& o, bool slow) {
    bar_homology(o, "com", Q, {1, 2, 6});
    bar_homology(o, "com", F2, {1, 2, 6});
    o.note << "H(B com) = 1,2,6 in degree n-1 over Q and F2";
    if (!slow) {
        o.note << "; arity 5 skipped (--fast)";
        return;
    }
    auto t0 = std::chrono::steady_clock::now();
    auto b = bar_construction(builtin_operad("com", F2, 5));
    Table h = homology_table(*b->coop->term(5));
    double s = seconds_since(t0);
    o.require(h == Table{{4, 24}}, "arity 5 H = " + table_str(h));
    o.require(s < kBarFiveSeconds, "arity 5 too slow");
    o.note << "; arity 5 over F2 " << table_str(h) << " in " << s << "s";
}

void bar_ass(Outcome& o) {
    bar_homology(o, "ass", Q, {2, 6, 24});
    o.note << "H(B ass) = 2,6,24 in degree n-1, Euler 2,6,24";
}

void theta_iso(Outcome& o) {
    auto a = generators(Q, 4, {0});
    std::vector<OperadPtr> ps = {builtin_operad("com", Q, 4), builtin_operad("ass", Q, 4), trivial_operad(a),
                                 free_operad(a, 4)};
    for (const auto& p : ps) {
        auto tb = theta_bundle(p);
        for (int n = 1; n <= 4; ++n) {
            o.require(check_map(make_map(tb.w->op->term(n), tb.cobar->op->term(n), tb.theta[n], 0, false)).empty(),
                      p->name + " chain " + std::to_string(n));
            o.require(invertible(Q, tb.theta[n]), p->name + " bijective " + std::to_string(n));
        }
        std::string why;
        o.require(is_operad_map(*tb.w->op, *tb.cobar->op, tb.theta, &why), p->name + " operad map " + why);
        if (p->name == "com") {
            o.require(tb.w->op->term(3)->dims() == Table{{0, 4}, {1, 3}}, "W(com)(3)");
            o.require(tb.cobar->op->term(3)->dims() == Table{{0, 4}, {1, 3}}, "CB(com)(3)");
        }
    }
    o.note << "com, ass, trivial(a), free(a), arity <= 4; W(com)(3) = CB(com)(3) = {0:4,1:3}";
}

void w_resolution(Outcome& o) {
    for (const char* name : {"com", "ass"}) {
        auto w = w_construction(builtin_operad(name, Q, 4));
        auto eta = w_eta(*w), zeta = w_zeta(*w);
        for (int n = 1; n <= 4; ++n) {
            o.require(equal(Q, mul(Q, eta[n], zeta[n]), Matrix::identity(w->p->term(n)->dim())),
                      std::string(name) + " eta zeta " + std::to_string(n));
            o.require(is_quasi_iso(make_map(w->op->term(n), w->p->term(n), eta[n])),
                      std::string(name) + " cone " + std::to_string(n));
        }
    }
    o.note << "eta zeta = id, cone(eta) acyclic for com, ass, arity <= 4";
}

void omega_sigma_check(Outcome& o) {
    for (std::vector<int> degs : {std::vector<int>{0}, std::vector<int>{1}, std::vector<int>{0, 1}}) {
        auto a = generators(Q, 4, degs);
        auto tb = theta_bundle(trivial_operad(a));
        auto os = omega_sigma(a);
        auto eps = epsilon_trivial(*tb.bar, *tb.cobar, *os);
        auto zeta = w_zeta(*tb.w);
        auto r = r_sharp(a);
        for (int n = 1; n <= 4; ++n) {
            o.require(is_quasi_iso(make_map(tb.cobar->op->term(n), os->term(n), eps[n])), "eps quasi-iso");
            o.require(equal(Q, mul(Q, eps[n], mul(Q, tb.theta[n], zeta[n])), r[n]), "eps theta zeta = r#");
        }
    }
    o.note << "a(2) = k[0], k[1], k[0]+k[1], arity <= 4";
}

void double_dual(Outcome& o) {
    for (const char* name : {"com", "ass"}) {
        auto rep = verify_kk(builtin_operad(name, Q, 4));
        o.require(rep.kp_iso, std::string(name) + " KP = C(dual P)");
        o.require(rep.cb_to_kk_iso, std::string(name) + " cb_to_kk");
        o.require(rep.composite_iso, std::string(name) + " WP -> KKP");
        o.require(rep.homology_equal, std::string(name) + " H(KKP) = H(P)");
        for (const auto& w : rep.witnesses) o.require(false, w);
        if (std::string(name) == "com") {
            o.require(rep.hkkp[3] == Table{{0, 1}}, "H(KK com)(3)");
            o.require(rep.kkp[3] == Table{{0, 4}, {1, 3}} && euler(rep.kkp[3]) == 1, "KK com(3) dims");
            o.note << "H(KK com)(3) = " << table_str(rep.hkkp[3]) << ", KK com(3) = " << table_str(rep.kkp[3]);
        }
    }
    o.note << "; com, ass arity <= 4";
}

void free_trivial(Outcome& o) {
    for (std::vector<int> degs : {std::vector<int>{0}, std::vector<int>{0, 1}}) {
        auto a = generators(Q, 4, degs);
        auto kt = koszul_dual(trivial_operad(a));
        auto fr = free_operad(dual_symseq(shift_symseq(a, 1)), 4);
        auto kf = koszul_dual(free_operad(a, 4));
        auto od = trivial_operad(shift_symseq(dual_symseq(a), -1));
        for (int n = 1; n <= 4; ++n) {
            o.require(homology_table(*kt->term(n)) == homology_table(*fr->term(n)), "K(trivial a) " + std::to_string(n));
            o.require(homology_table(*kf->term(n)) == homology_table(*od->term(n)), "K(free a) " + std::to_string(n));
        }
    }
    o.note << "a(2) = k[0] and k[0]+k[1], arity <= 4";
}

void co_w(Outcome& o) {
    auto com = builtin_operad("com", Q, 3);
    auto q = extend_cooperad(bar_construction(com)->coop);
    auto ts = theta_star(q);
    const CoW& w = *ts.cow;
    auto eta = cow_eta(w, 3), zeta = cow_zeta(w, 3);
    for (int n = 1; n <= 3; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            auto k = to_string(t);
            o.require(equal(Q, mul(Q, zeta[k], eta[k]), Matrix::identity(q->at(t)->dim())), "zeta eta " + k);
            o.require(is_quasi_iso(make_map(q->at(t), w.at(t), eta[k])), "eta quasi-iso " + k);
            auto f = make_map(ts.bcq->at(t), w.at(t), ts.map.at(k), 0, false);
            o.require(check_map(f).empty() && is_quasi_iso(f), "theta* quasi-iso " + k);
        }
    std::string why;
    o.require(is_precooperad_map(*q, w, eta, 3, &why), "eta* map " + why);
    o.require(is_precooperad_map(*ts.bcq, w, ts.map, 3, &why), "theta* map " + why);
    o.require(is_quasi_cooperad(*q, 3).ok, "Q quasi");
    o.require(is_quasi_cooperad(w, 3).ok, "W^cQ quasi");
    o.require(is_quasi_cooperad(*ts.bcq, 3).ok, "BCQ quasi");
    auto bad = is_quasi_cooperad(*corrupt_precooperad(q, Tree::corolla(2), 1, Tree::corolla(2)), 3);
    o.require(!bad.ok, "corrupted pre-cooperad passed");
    o.note << "Q = extend(bar com), arity <= 3; corrupted m flagged at " << (bad.witnesses.empty() ? "?" : bad.witnesses.front());
}

void adjunction(Outcome& o) {
    int N = 3;
    auto com = builtin_operad("com", Q, N);
    auto q = extend_cooperad(bar_construction(com)->coop);
    auto cq = cobar_construction(q);
    auto round_trips = [&](const BBar& bb, const CobarResult& target, const PreMap& psi, const std::string& tag) {
        auto phi = transpose_to_operad(bb, target, psi);
        o.require(same(Q, transpose_to_precooperad(bb, target, phi), psi), "(psi#)# " + tag);
        auto again = transpose_to_operad(bb, target, transpose_to_precooperad(bb, target, phi));
        for (int n = 1; n <= N; ++n) o.require(equal(Q, again[n], phi[n]), "(phi#)# " + tag);
        bool nonzero = false;
        for (int n = 2; n <= N; ++n) nonzero = nonzero || !is_zero(Q, phi[n]);
        return nonzero;
    };
    auto fr = free_operad(generators(Q, N, {0}), N);
    int com_nonzero = 0, free_nonzero = 0;
    try {
        for (const auto& p : {com, fr}) {
            auto bb = std::make_shared<BBar>(p);
            round_trips(*bb, *cq, zero_premap(*bb, *q, N), p->name + " zero");
            round_trips(*bb, *cobar_construction(bb), identity_premap(*bb, N), p->name + " unit");
            for (unsigned seed = 1; seed <= 10; ++seed) {
                auto psi = random_precooperad_map(*bb, *q, N, seed);
                o.require(is_precooperad_map(*bb, *q, psi, N), "random map invalid");
                bool nz = round_trips(*bb, *cq, psi, p->name + " seed " + std::to_string(seed));
                (p == com ? com_nonzero : free_nonzero) += nz;
            }
        }
    } catch (const OperadError& e) {
        o.require(false, e.what());
    }
    o.require(free_nonzero >= 8, "too few nonzero maps for the free operad");
    o.note << "zero, unit, 10 seeds each for P = com (" << com_nonzero << " nonzero: every valid map out of BBcom is zero)"
           << " and P = free binary (" << free_nonzero << " nonzero)";
}

void engines(Outcome& o) {
    for (const char* name : {"com", "ass"}) {
        auto p = builtin_operad(name, Q, 4);
        auto b = bar_construction(p);
        auto w = w_construction(p);
        auto cb = cobar_construction(extend_cooperad(b->coop));
        for (int n = 2; n <= 4; ++n) {
            auto tag = std::string(name) + " " + std::to_string(n);
            auto r1 = compare_coend(Q, b->cubes[n], b->coeffs(n));
            o.require(r1.ok, "bar " + tag + " " + r1.detail);
            auto r2 = compare_coend(Q, w->cubes[n], w->coeffs(n));
            o.require(r2.ok, "W " + tag + " " + r2.detail);
            auto r3 = compare_end(Q, cb->cubes[n], cb->coeffs(n));
            o.require(r3.ok, "cobar " + tag + " " + r3.detail);
        }
        for (int n = 2; n <= 3; ++n) {
            auto tag = std::string(name) + " " + std::to_string(n);
            o.require(compare_relation_sets(Q, b->cubes[n].diagram(), b->coeffs(n), false).ok, "bar relations " + tag);
            o.require(compare_relation_sets(Q, w->cubes[n].diagram(), w->coeffs(n), false).ok, "W relations " + tag);
            o.require(compare_relation_sets(Q, cb->cubes[n].diagram(), cb->coeffs(n), true).ok, "cobar relations " + tag);
            o.require(compare_coend(Q, w->cubes[n], w->coeffs(n), true).ok, "W all relations " + tag);
        }
    }
    o.note << "bar, W, cobar closed forms = engine, arity <= 4; cover = all relations, arity <= 3";
}

void homotopy_invariance(Outcome& o) {
    auto com = builtin_operad("com", Q, 3);
    auto w = w_construction(com);
    auto bw = bar_construction(w->op), bc = bar_construction(com);
    auto beta = bar_map(*bw, *bc, w_eta(*w));
    std::string why;
    o.require(is_cooperad_map(*bw->coop, *bc->coop, beta, &why), "cooperad map " + why);
    for (int n = 1; n <= 3; ++n) {
        auto f = make_map(bw->coop->term(n), bc->coop->term(n), beta[n], 0, false);
        o.require(check_map(f).empty() && is_quasi_iso(f), "quasi-iso " + std::to_string(n));
    }
    o.note << "B(eta): B(W com) -> B(com) cooperad map and quasi-iso, arity <= 3";
}

} // namespace

int main(int argc, char** argv) {
    bool slow = true;
    for (int i = 1; i < argc; ++i)
        if (std::strcmp(argv[i], "--fast") == 0) slow = false;
    std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
        {"tree census", census},
        {"bar homology of com", [&](Outcome& o) { bar_com(o, slow); }},
        {"bar homology of ass", bar_ass},
        {"theta: WP -> CBP is an operad isomorphism", theta_iso},
        {"W-resolution", w_resolution},
        {"Omega Sigma comparison", omega_sigma_check},
        {"double Koszul dual", double_dual},
        {"free / trivial duality", free_trivial},
        {"co-W and rigidification", co_w},
        {"adjunction round trips", adjunction},
        {"engine cross-validation", engines},
        {"homotopy invariance of bar", homotopy_invariance},
    };
    int failed = 0;
    for (size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        auto t0 = std::chrono::steady_clock::now();
        try {
            criteria[i].second(o);
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        double s = seconds_since(t0);
        // the arity-5 bar computation has its own limit
        double limit = (i == 1 && slow) ? kBarFiveSeconds + kCriterionSeconds : kCriterionSeconds;
        o.require(s < limit, "over time limit");
        failed += !o.pass;
        std::printf("%s %2zu %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), s,
                    o.note.str().c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
