#include "opdual/cli.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>

namespace opdual {

using nlohmann::json;

namespace {

Scalar parse_scalar(const json& v) {
    if (v.is_number_integer()) return Scalar(v.get<long>());
    if (v.is_string()) {
        try {
            Scalar s(v.get<std::string>());
            s.canonicalize();
            return s;
        } catch (const std::invalid_argument&) {
        }
    }
    throw InputError("bad scalar " + v.dump());
}

Matrix parse_matrix(const Field& F, const json& rows, int r, int c, const std::string& what) {
    if (!rows.is_array() || static_cast<int>(rows.size()) != r) throw InputError(what + ": expected " + std::to_string(r) + " rows");
    Matrix m(r, c);
    for (int i = 0; i < r; ++i) {
        if (!rows[i].is_array() || static_cast<int>(rows[i].size()) != c)
            throw InputError(what + ": row " + std::to_string(i) + " must have " + std::to_string(c) + " entries");
        for (int j = 0; j < c; ++j) m.add(i, j, parse_scalar(rows[i][j]));
    }
    m.normalize(F);
    return m;
}

Field spec_field(const json& j) {
    if (!j.contains("field")) return Field::rationals();
    const json& f = j["field"];
    try {
        if (f.is_string()) return Field::parse(f.get<std::string>());
        if (f.is_object() && f.contains("p")) return Field::prime(f["p"].get<long>());
    } catch (const FieldError& e) {
        throw InputError(e.what());
    }
    throw InputError("bad field " + f.dump());
}

int arity_key(const std::string& k) {
    try {
        size_t pos = 0;
        int n = std::stoi(k, &pos);
        if (pos == k.size() && n >= 1) return n;
    } catch (const std::exception&) {
    }
    throw InputError("bad arity key '" + k + "'");
}

int spec_arity(const json& j, int N) {
    int M = j.value("max_arity", N);
    if (N > M) throw InputError("file defines arities up to " + std::to_string(M) + ", asked for " + std::to_string(N));
    return N;
}

std::string tag(const std::vector<int>& v) {
    std::string s = "(";
    for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
    return s + ")";
}

} // namespace

SymSeq load_symseq_spec(const json& j, int N) {
    try {
        Field F = spec_field(j);
        N = spec_arity(j, N);
        SymSeq a(F, N);
        const json terms = j.value("terms", json::object()), sigma = j.value("sigma", json::object());
        for (const auto& [key, t] : terms.items()) {
            int n = arity_key(key);
            if (n > N) continue;
            std::vector<int> deg;
            std::vector<std::string> names;
            for (const auto& b : t.at("basis")) {
                deg.push_back(b.at("degree").get<int>());
                names.push_back(b.value("name", "e" + std::to_string(names.size())));
            }
            int d = static_cast<int>(deg.size());
            Matrix bd(d, d);
            const json d_entries = t.value("d", json::array());
            for (const auto& e : d_entries) {
                if (!e.is_array() || e.size() != 3) throw InputError("arity " + key + ": d entries are [row, col, val]");
                int r = e[0].get<int>(), c = e[1].get<int>();
                if (r < 0 || r >= d || c < 0 || c >= d) throw InputError("arity " + key + ": d entry out of range");
                bd.add(r, c, parse_scalar(e[2]));
            }
            if (n == 1) {
                if (d != 1 || deg[0] != 0 || !is_zero(F, bd)) throw InputError("arity 1 must be the unit");
                continue;
            }
            a.set_term(n, share(ChainComplex(F, deg, bd, names)));
        }
        for (const auto& [key, acts] : sigma.items()) {
            int n = arity_key(key);
            if (n > N) continue;
            for (const auto& [sk, m] : acts.items()) {
                if (sk.rfind("s_", 0) != 0) throw InputError("sigma keys are s_k");
                int k = arity_key(sk.substr(2));
                int d = a.term(n)->dim();
                a.set_s(n, k, parse_matrix(F, m, d, d, "sigma " + key + " " + sk));
            }
        }
        auto bad = a.check();
        if (!bad.empty()) throw InputError("symmetric group action: " + bad.front());
        return a;
    } catch (const json::exception& e) {
        throw InputError(std::string("spec: ") + e.what());
    } catch (const ChainError& e) {
        throw InputError(std::string("spec: ") + e.what());
    } catch (const OperadError& e) {
        throw InputError(std::string("spec: ") + e.what());
    } catch (const FieldError& e) {
        throw InputError(std::string("spec: ") + e.what());
    }
}

OperadPtr load_operad_spec(const json& j, int N) {
    auto p = std::make_shared<Operad>();
    p->name = j.value("name", "file");
    p->seq = load_symseq_spec(j, N);
    const Field& F = p->field();
    try {
        const json circ = j.value("circ", json::array());
        for (const auto& c : circ) {
            int m = c.at("m").get<int>(), n = c.at("n").get<int>(), i = c.at("i").get<int>();
            if (m < 1 || n < 1 || i < 1 || i > m) throw InputError("bad circ index " + tag({m, n, i}));
            if (m + n - 1 > N) continue;
            p->circ[{m, n, i}] = parse_matrix(F, c.at("matrix"), p->term(m + n - 1)->dim(),
                                              p->term(m)->dim() * p->term(n)->dim(), "circ" + tag({m, n, i}));
        }
    } catch (const json::exception& e) {
        throw InputError(std::string("spec: ") + e.what());
    } catch (const FieldError& e) {
        throw InputError(std::string("spec: ") + e.what());
    }
    add_unit_circs(*p);
    // compositions with a zero-dimensional source or target need not be listed
    for (int m = 2; m <= N; ++m)
        for (int n = 2; m + n - 1 <= N; ++n)
            for (int i = 1; i <= m; ++i) {
                int r = p->term(m + n - 1)->dim(), c = p->term(m)->dim() * p->term(n)->dim();
                if (!p->circ.count({m, n, i}) && (r == 0 || c == 0)) p->circ[{m, n, i}] = Matrix(r, c);
            }
    auto bad = check_operad_axioms(*p);
    if (!bad.empty()) throw InputError("operad axioms fail: " + bad.front());
    return p;
}

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open " + path);
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(path + ": " + e.what());
    }
}

OperadPtr select_operad(const std::string& selector, const Field& F, int N) {
    std::string base = selector;
    int cut = -1;
    for (const std::string le : {"<=", "\xE2\x89\xA4"}) {
        auto pos = selector.rfind(le);
        if (pos == std::string::npos) continue;
        base = selector.substr(0, pos);
        std::string num = selector.substr(pos + le.size());
        try {
            size_t used = 0;
            cut = std::stoi(num, &used);
            if (used != num.size()) cut = -1;
        } catch (const std::exception&) {
        }
        if (cut < 1 || cut > N) throw InputError("bad truncation in '" + selector + "'");
        break;
    }
    OperadPtr p;
    auto after = [&](const std::string& prefix) { return base.substr(prefix.size()); };
    try {
        if (base.rfind("trivial:", 0) == 0)
            p = trivial_operad(load_symseq_spec(read_json_file(after("trivial:")), N), "trivial");
        else if (base.rfind("free:", 0) == 0)
            p = free_operad(load_symseq_spec(read_json_file(after("free:")), N), N, "free");
        else if (base.rfind("file:", 0) == 0)
            p = load_operad_spec(read_json_file(after("file:")), N);
        else
            p = builtin_operad(base, F, N);
    } catch (const OperadError& e) {
        throw InputError(e.what());
    }
    if (cut > 0) p = truncate(*p, cut, TruncMode::AtMost);
    return p;
}

// ---- reports ---------------------------------------------------------------

namespace {

using Table = std::map<int, int>;

struct Report {
    json header;
    std::map<std::string, std::map<int, Table>> tables;
    struct Check {
        std::string name;
        bool pass;
        std::string witness;
    };
    std::vector<Check> checks;
    json matrices = json::object();

    void check(const std::string& name, bool pass, const std::string& witness = "") {
        checks.push_back({name, pass, witness});
    }
    void add(const std::string& name, const SymSeq& s, bool homology) {
        for (int n = 1; n <= s.max_arity(); ++n) {
            tables[name][n] = s.term(n)->dims();
            if (homology) tables["H(" + name + ")"][n] = homology_table(*s.term(n));
        }
    }
    bool ok() const {
        return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
    }
};

json triples(const Matrix& m) {
    json out = json::array();
    for (int c = 0; c < m.cols(); ++c)
        for (const auto& [r, v] : m.col(c)) out.push_back({r, c, v.get_str()});
    return out;
}

void dump_differentials(Report& rep, const std::string& name, const SymSeq& s) {
    for (int n = 1; n <= s.max_arity(); ++n) {
        const auto& c = *s.term(n);
        rep.matrices[name][std::to_string(n)] = {{"degrees", c.degrees()}, {"d", triples(c.d())}};
    }
}

void write(const Report& rep, const std::string& format, std::ostream& out) {
    if (format == "tsv") {
        out << "arity\tdegree\tdim\n";
        for (const auto& [name, byarity] : rep.tables) {
            out << "# " << name << "\n";
            for (const auto& [n, t] : byarity)
                for (auto [d, k] : t) out << n << "\t" << d << "\t" << k << "\n";
        }
        for (const auto& c : rep.checks)
            out << "# check\t" << c.name << "\t" << (c.pass ? "pass" : "fail") << "\t" << c.witness << "\n";
        return;
    }
    json j = rep.header;
    json tables = json::object();
    for (const auto& [name, byarity] : rep.tables) {
        json t = json::object();
        for (const auto& [n, tab] : byarity) {
            json row = json::object();
            for (auto [d, k] : tab) row[std::to_string(d)] = k;
            t[std::to_string(n)] = row;
        }
        tables[name] = t;
    }
    j["tables"] = tables;
    j["checks"] = json::array();
    for (const auto& c : rep.checks) j["checks"].push_back({{"name", c.name}, {"pass", c.pass}, {"witness", c.witness}});
    if (!rep.matrices.empty()) j["matrices"] = rep.matrices;
    out << j.dump(2) << "\n";
}

std::string rank_witness(const Field& F, const Matrix& m) {
    return "rank " + std::to_string(rank(F, m)) + " of " + std::to_string(m.rows()) + "x" + std::to_string(m.cols());
}

bool invertible(const Field& F, const Matrix& m) { return m.rows() == m.cols() && rank(F, m) == m.rows(); }

void check_axioms(Report& rep, const Operad& p) {
    auto bad = check_operad_axioms(p);
    rep.check("operad-axioms", bad.empty(), bad.empty() ? "" : bad.front());
}

void check_w(Report& rep, const WResult& w) {
    const Field& F = w.p->field();
    auto eta = w_eta(w), zeta = w_zeta(w);
    std::string why;
    rep.check("eta-operad-map", is_operad_map(*w.op, *w.p, eta, &why), why);
    for (int n = 1; n <= w.p->max_arity(); ++n) {
        auto a = std::to_string(n);
        rep.check("eta-zeta-identity(" + a + ")",
                  equal(F, mul(F, eta[n], zeta[n]), Matrix::identity(w.p->term(n)->dim())));
        rep.check("eta-quasi-iso(" + a + ")", is_quasi_iso(make_map(w.op->term(n), w.p->term(n), eta[n])));
    }
}

void check_theta(Report& rep, const ThetaBundle& tb) {
    const Field& F = tb.w->p->field();
    for (int n = 1; n <= tb.w->p->max_arity(); ++n) {
        auto a = std::to_string(n);
        auto f = make_map(tb.w->op->term(n), tb.cobar->op->term(n), tb.theta[n], 0, false);
        auto why = check_map(f);
        rep.check("theta-chain-map(" + a + ")", why.empty(), why);
        rep.check("theta-invertible(" + a + ")", invertible(F, tb.theta[n]), rank_witness(F, tb.theta[n]));
    }
    std::string why;
    rep.check("theta-operad-map", is_operad_map(*tb.w->op, *tb.cobar->op, tb.theta, &why), why);
}

void check_kk(Report& rep, const DualityReport& d) {
    auto w = [&](const std::string& prefix) {
        std::string s;
        for (const auto& x : d.witnesses)
            if (x.rfind(prefix, 0) == 0) s += (s.empty() ? "" : "; ") + x;
        return s;
    };
    rep.check("kp-cobar-dual-iso", d.kp_iso, w("KP"));
    rep.check("cb-to-kk-iso", d.cb_to_kk_iso, w("CBP"));
    rep.check("w-to-kk-iso", d.composite_iso, w("WP"));
    rep.check("homology-kk-equals-p", d.homology_equal, w("homology"));
}

void check_quasi(Report& rep, const OperadPtr& p) {
    auto q = extend_cooperad(bar_construction(p)->coop);
    int N = std::min(p->max_arity(), 3);
    auto r1 = is_quasi_cooperad(*q, N);
    rep.check("quasi-cooperad(extend BP)", r1.ok, r1.witnesses.empty() ? "" : r1.witnesses.front());
    CoW w(q);
    auto r2 = is_quasi_cooperad(w, N);
    rep.check("quasi-cooperad(co-W)", r2.ok, r2.witnesses.empty() ? "" : r2.witnesses.front());
    auto eta = cow_eta(w, N), zeta = cow_zeta(w, N);
    bool inv = true, qi = true;
    for (int n = 1; n <= N; ++n)
        for (const Tree& t : enumerate_trees(n)) {
            auto k = to_string(t);
            inv = inv && equal(p->field(), mul(p->field(), zeta[k], eta[k]), Matrix::identity(q->at(t)->dim()));
            qi = qi && is_quasi_iso(make_map(q->at(t), w.at(t), eta[k]));
        }
    rep.check("co-W zeta-eta-identity", inv);
    rep.check("co-W eta-quasi-iso", qi);
}

bool same_premap(const Field& F, const PreMap& a, const PreMap& b) {
    if (a.size() != b.size()) return false;
    for (const auto& [k, m] : a) {
        auto it = b.find(k);
        if (it == b.end() || !equal(F, m, it->second)) return false;
    }
    return true;
}

void check_adjunction(Report& rep, const OperadPtr& p, unsigned seed) {
    const Field& F = p->field();
    int N = std::min(p->max_arity(), 3);
    auto q = extend_cooperad(bar_construction(p)->coop);
    auto cq = cobar_construction(q);
    auto bb = std::make_shared<BBar>(p);
    auto roundtrip = [&](const std::string& name, const PreMap& psi, const CobarResult& target) {
        auto phi = transpose_to_operad(*bb, target, psi);
        bool ok = same_premap(F, transpose_to_precooperad(*bb, target, phi), psi);
        auto again = transpose_to_operad(*bb, target, transpose_to_precooperad(*bb, target, phi));
        for (int n = 1; n <= N && ok; ++n) ok = equal(F, again[n], phi[n]);
        rep.check("adjunction-round-trip(" + name + ")", ok);
    };
    try {
        roundtrip("zero", zero_premap(*bb, *q, N), *cq);
        roundtrip("unit", identity_premap(*bb, N), *cobar_construction(bb));
        for (unsigned s = seed; s < seed + 3; ++s)
            roundtrip("seed " + std::to_string(s), random_precooperad_map(*bb, *q, N, s), *cq);
    } catch (const OperadError& e) {
        rep.check("adjunction-round-trip", false, e.what());
    }
}

} // namespace

int run(const Command& c, std::ostream& out) {
    if (c.max_arity < 1) throw InputError("--max-arity must be at least 1");
    if (c.out != "json" && c.out != "tsv") throw InputError("--out must be json or tsv");
    Field F;
    try {
        F = Field::parse(c.field);
    } catch (const FieldError& e) {
        throw InputError(e.what());
    }
    Report rep;
    std::string cmd = c.verb + (c.what.empty() ? "" : " " + c.what);
    int N = c.max_arity;
    rep.header = {{"command", cmd}, {"field", F.name()}, {"max_arity", N}};

    if (c.verb == "trees") {
        auto oracle = total_partition_counts(N);
        bool ok = true;
        std::string witness;
        for (int n = 1; n <= N; ++n) {
            long k = tree_count(n);
            rep.tables["trees"][n] = {{0, static_cast<int>(k)}};
            if (k != oracle[n]) {
                ok = false;
                witness = "arity " + std::to_string(n) + ": " + std::to_string(k) + " vs " + std::to_string(oracle[n]);
            }
        }
        rep.check("census-matches-recurrence", ok, witness);
        write(rep, c.out, out);
        return rep.ok() ? 0 : 1;
    }

    OperadPtr p = select_operad(c.operad, F, N);
    rep.header["operad"] = c.operad;
    rep.header["field"] = p->field().name();
    rep.add("P", p->seq, c.homology);

    if (c.verb == "bar") {
        auto b = bar_construction(p);
        rep.add("BP", b->coop->seq, c.homology);
        auto bad = check_cooperad_axioms(*b->coop);
        rep.check("cooperad-axioms", bad.empty(), bad.empty() ? "" : bad.front());
        if (c.verbose) dump_differentials(rep, "BP", b->coop->seq);
    } else if (c.verb == "cobar") {
        auto tb = theta_bundle(p);
        rep.add("CBP", tb.cobar->op->seq, c.homology);
        check_axioms(rep, *tb.cobar->op);
        if (c.verbose) dump_differentials(rep, "CBP", tb.cobar->op->seq);
    } else if (c.verb == "w") {
        auto w = w_construction(p);
        rep.add("WP", w->op->seq, c.homology);
        check_w(rep, *w);
        if (c.verbose) dump_differentials(rep, "WP", w->op->seq);
    } else if (c.verb == "koszul") {
        auto k = koszul(p);
        rep.add("KP", k.k->seq, c.homology);
        std::string why;
        bool ok = is_operad_map(*k.k, *k.cdual->op, k.iso, &why);
        for (int n = 1; n <= N; ++n) ok = ok && invertible(p->field(), k.iso[n]);
        rep.check("kp-cobar-dual-iso", ok, why);
        if (c.verbose) dump_differentials(rep, "KP", k.k->seq);
    } else if (c.verb == "kk" || (c.verb == "check" && c.what == "kk")) {
        auto d = verify_kk(p);
        auto put = [&](const std::string& name, const std::vector<Table>& v) {
            for (int n = 1; n < static_cast<int>(v.size()); ++n) rep.tables[name][n] = v[n];
        };
        put("BP", d.bp);
        put("KP", d.kp);
        put("KKP", d.kkp);
        put("H(P)", d.hp);
        put("H(KKP)", d.hkkp);
        check_kk(rep, d);
    } else if (c.verb == "check") {
        if (c.what == "axioms")
            check_axioms(rep, *p);
        else if (c.what == "theta")
            check_theta(rep, theta_bundle(p));
        else if (c.what == "w")
            check_w(rep, *w_construction(p));
        else if (c.what == "quasi")
            check_quasi(rep, p);
        else if (c.what == "adjunction")
            check_adjunction(rep, p, c.seed);
        else
            throw InputError("unknown check '" + c.what + "' (axioms theta w kk quasi adjunction)");
    } else {
        throw InputError("unknown verb '" + c.verb + "'");
    }
    write(rep, c.out, out);
    return rep.ok() ? 0 : 1;
}

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Bar, cobar, W and Koszul dual constructions for operads of chain complexes"};
    app.require_subcommand(1);
    app.fallthrough();
    Command c;
    app.add_option("--operad", c.operad, "builtin name | trivial:<file> | free:<file> | file:<path>, optional <=n");
    app.add_option("--max-arity", c.max_arity, "largest arity computed");
    app.add_option("--field", c.field, "q or f<p>");
    app.add_flag("--homology", c.homology, "add homology tables");
    app.add_option("--out", c.out, "json or tsv");
    app.add_option("--seed", c.seed, "seed for randomized checks");
    app.add_flag("--verbose", c.verbose, "dump differentials");
    std::map<std::string, CLI::App*> subs;
    for (const char* v : {"trees", "bar", "cobar", "w", "koszul", "kk", "check"}) subs[v] = app.add_subcommand(v);
    subs["check"]->add_option("what", c.what, "axioms | theta | w | kk | quasi | adjunction")->required();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return 0;
        }
        err << e.what() << "\n";
        return 2;
    }
    for (const auto& [name, sub] : subs)
        if (sub->parsed()) c.verb = name;
    try {
        return run(c, out);
    } catch (const InputError& e) {
        err << "input error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
}

} // namespace opdual
