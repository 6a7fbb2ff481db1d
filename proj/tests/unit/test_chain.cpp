#include "doctest.h"

#include "opdual/chain.hpp"

#include <random>

using namespace opdual;

namespace {

Field Q = Field::rationals();

ChainComplex interval(const Field& F) {
    Matrix d1(2, 1);
    d1.col(0) = {{0, Scalar(-1)}, {1, Scalar(1)}};
    return build_complex(F, {{0, {"g0", "g1"}}, {1, {"g"}}}, {{1, d1}});
}

// Random complex built as a sum of random "elementary" pieces conjugated by
// a random basis change, so d^2 = 0 by construction.
ChainComplex random_complex(const Field& F, std::mt19937& rng, int lo, int hi) {
    std::uniform_int_distribution<int> deg(lo, hi), coin(0, 2), val(-2, 2);
    std::vector<int> degs;
    std::vector<std::pair<int, int>> pairs;
    int pieces = 1 + coin(rng) + coin(rng);
    for (int p = 0; p < pieces; ++p) {
        int k = deg(rng);
        if (coin(rng) == 0) {
            degs.push_back(k);
        } else {
            degs.push_back(k);
            degs.push_back(k + 1);
            pairs.emplace_back(static_cast<int>(degs.size()) - 2, static_cast<int>(degs.size()) - 1);
        }
    }
    int n = static_cast<int>(degs.size());
    Matrix d(n, n);
    for (auto [lo_i, hi_i] : pairs) d.col(hi_i)[lo_i] = 1;
    // Basis change by a random unipotent within each degree.
    Matrix g = Matrix::identity(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (degs[i] == degs[j]) g.col(j)[i] = val(rng);
    g.normalize(F);
    Matrix gi = *inverse(F, g);
    return ChainComplex(F, degs, mul(F, mul(F, g, d), gi));
}

} // namespace

TEST_SUITE("chain") {

TEST_CASE("field parsing and arithmetic") {
    CHECK(Field().characteristic() == 2);
    CHECK(Field::parse("q").is_rational());
    CHECK(Field::parse("f5").characteristic() == 5);
    CHECK_THROWS_AS(Field::parse("f4"), FieldError);
    CHECK_THROWS_AS(Field::parse("x"), FieldError);
    Field F3 = Field::prime(3);
    CHECK(F3.reduce(Scalar(-1)) == 2);
    CHECK(F3.reduce(Scalar(1, 2)) == 2);
    CHECK(F3.inv(Scalar(2)) == 2);
}

TEST_CASE("interval is a valid complex with homology k[0]") {
    auto H = interval(Q);
    CHECK(H.dim() == 3);
    CHECK(homology_table(H) == std::map<int, int>{{0, 1}});
}

TEST_CASE("d^2 != 0 is rejected") {
    Matrix d1(1, 1), d2(1, 1);
    d1.col(0)[0] = 1;
    d2.col(0)[0] = 1;
    CHECK_THROWS_AS(build_complex(Q, {{0, {"a"}}, {1, {"b"}}, {2, {"c"}}}, {{1, d1}, {2, d2}}), ChainError);
}

TEST_CASE("direct sum of k[0] and k[1]") {
    auto s = direct_sum({ChainComplex::unit(Q, 0), ChainComplex::unit(Q, 1)});
    CHECK(s.dims() == std::map<int, int>{{0, 1}, {1, 1}});
    CHECK(is_zero(Q, s.d()));
}

TEST_CASE("tensor of intervals") {
    auto H = interval(Q);
    auto HH = tensor(H, H);
    CHECK(HH.dims() == std::map<int, int>{{0, 4}, {1, 4}, {2, 1}});
    CHECK(homology_table(HH) == std::map<int, int>{{0, 1}});
    // d(g (x) g) = (g1 - g0) (x) g - g (x) (g1 - g0)
    SparseVec expect{{0 * 3 + 2, Scalar(-1)}, {1 * 3 + 2, Scalar(1)}, {2 * 3 + 0, Scalar(1)}, {2 * 3 + 1, Scalar(-1)}};
    CHECK(HH.d().col(2 * 3 + 2) == expect);
}

TEST_CASE("linear dual") {
    auto k2 = ChainComplex::unit(Q, 2);
    CHECK(linear_dual(k2).dims() == std::map<int, int>{{-2, 1}});
    auto H = share(interval(Q));
    CHECK(homology_table(linear_dual(*H)) == std::map<int, int>{{0, 1}});
    auto dd = double_dual_map(H);
    CHECK(is_chain_map(dd));
    CHECK(inverse(Q, dd.m).has_value());
    for (int i = 0; i < H->dim(); ++i) CHECK(abs(dd.m.at(i, i)) == 1);
}

TEST_CASE("shift") {
    auto k = ChainComplex::unit(Q, 0);
    CHECK(shift(k, 1).dims() == std::map<int, int>{{1, 1}});
    auto H = interval(Q);
    auto back = shift(shift(H, 1), -1);
    CHECK(back.degrees() == H.degrees());
    CHECK(equal(Q, back.d(), H.d()));
    CHECK(homology_table(shift(H, 3)) == std::map<int, int>{{3, 1}});
}

TEST_CASE("quasi-isomorphisms") {
    auto H = share(interval(Q));
    auto k = share(ChainComplex::unit(Q, 0));
    CHECK(is_quasi_iso(identity_map(H)));
    CHECK_FALSE(is_quasi_iso(zero_map(k, k)));
    Matrix m(3, 1);
    m.col(0)[1] = 1;
    auto incl = make_map(k, H, m);
    CHECK(is_quasi_iso(incl));
}

TEST_CASE("homology tables") {
    Matrix d(1, 1);
    d.col(0)[0] = 1;
    CHECK(homology_table(build_complex(Q, {{0, {"a"}}, {1, {"b"}}}, {{1, d}})).empty());
    Matrix d2(1, 3);
    d2.col(0)[0] = 1;
    d2.col(1)[0] = 1;
    d2.col(2)[0] = 1;
    auto c = build_complex(Q, {{1, {"x"}}, {2, {"a", "b", "c"}}}, {{2, d2}});
    CHECK(homology_table(c) == std::map<int, int>{{2, 2}});
    CHECK(euler(c) == euler(homology_table(c)));
}

TEST_CASE("kernel and cokernel") {
    auto H = share(interval(Q));
    auto z = kernel_cokernel(zero_map(H, H));
    CHECK(z.ker.cx->dim() == 3);
    CHECK(z.coker.cx->dim() == 3);
    auto id = kernel_cokernel(identity_map(H));
    CHECK(id.ker.cx->dim() == 0);
    CHECK(id.coker.cx->dim() == 0);
    auto k2 = share(ChainComplex(Q, {0, 0}, Matrix(2, 2)));
    auto k1 = share(ChainComplex::unit(Q, 0));
    Matrix m(1, 2);
    m.col(0)[0] = 1;
    m.col(1)[0] = -1;
    auto kc = kernel_cokernel(make_map(k2, k1, m));
    CHECK(kc.ker.cx->dim() == 1);
    CHECK(kc.coker.cx->dim() == 0);
}

TEST_CASE("random complexes: tensor symmetry, pairing, hom, dual maps") {
    for (long p : {0L, 2L, 3L}) {
        Field F = p ? Field::prime(p) : Q;
        std::mt19937 rng(1234 + p);
        for (int trial = 0; trial < 12; ++trial) {
            auto a = random_complex(F, rng, -1, 2);
            auto b = random_complex(F, rng, -2, 1);
            auto ab = share(tensor(a, b));
            auto sym = symmetry(ab, a, b);
            CHECK(is_chain_map(sym));
            CHECK(inverse(F, sym.m).has_value());
            auto pr = pairing(a, b);
            CHECK(is_chain_map(pr));
            auto ha = homology_table(a), hb = homology_table(b);
            CHECK(euler(a) == euler(ha));
            // Kuenneth over a field.
            std::map<int, int> expect;
            for (auto [i, x] : ha)
                for (auto [j, y] : hb) expect[i + j] += x * y;
            CHECK(homology_table(*ab) == expect);
            auto dd = double_dual_map(share(a));
            CHECK(is_chain_map(dd));
            // Hom(a,b) has the homology of b (x) dual(a).
            auto hm = hom(a, b);
            std::map<int, int> hexp;
            for (auto [i, x] : ha)
                for (auto [j, y] : hb) hexp[j - i] += x * y;
            CHECK(homology_table(hm) == hexp);
            auto c = random_complex(F, rng, -1, 1);
            auto abc1 = tensor(*ab, c);
            auto abc2 = tensor(a, tensor(b, c));
            CHECK(equal(F, abc1.d(), abc2.d()));
        }
    }
}

TEST_CASE("tensor and dual of maps obey the chain law") {
    auto H = share(interval(Q));
    auto k = share(ChainComplex::unit(Q, 0));
    Matrix m(3, 1);
    m.col(0)[0] = 1;
    auto f = make_map(k, H, m);
    // k[0] -> H picking g0, tensored with the degree-1 shift H -> H[1]
    auto s = share(shift(*H, 1));
    Matrix sm = Matrix::identity(3);
    auto sh = make_map(H, s, sm, 1);
    auto ff = tensor(f, sh);
    CHECK(is_chain_map(ff));
    auto fs = tensor(sh, f);
    CHECK(is_chain_map(fs));
    auto df = dual_map(sh, share(linear_dual(*s)), share(linear_dual(*H)));
    CHECK(is_chain_map(df));
    auto dff = dual_map(f, share(linear_dual(*H)), share(linear_dual(*k)));
    CHECK(is_chain_map(dff));
}

}
