#pragma once

#include "opdual/barcobar.hpp"

#include "json.hpp"

namespace opdual {

// KP = dual of BP, together with the isomorphism KP -> C(dual P).
struct KoszulResult {
    OperadPtr p;
    BarPtr bar;
    OperadPtr k;
    CobarPtr cdual;             // cobar(dual_precooperad(p))
    std::vector<Matrix> iso;    // KP(n) -> C(dual P)(n), index 1..N
};
KoszulResult koszul(OperadPtr p);
OperadPtr koszul_dual(OperadPtr p);

// extend(q) -> extend(dual dual q), tensor of the per-vertex double duals.
PreMap double_dual_map(CooperadPtr q, int N);

// CBP -> KKP: cobar of BP -> dual(KP) followed by the inverse of KP' -> C(dual P')
// for P' = KP.
struct CbToKk {
    ThetaBundle tb;
    KoszulResult k1;  // K of P
    KoszulResult k2;  // K of KP
    PreMap to_dual;   // extend(BP)(T) -> dual(KP(T))
    std::vector<Matrix> map;
};
CbToKk cb_to_kk(OperadPtr p);

struct DualityReport {
    std::string name;
    int max_arity = 0;
    using Table = std::map<int, int>;
    std::vector<Table> p, bp, kp, kkp, hp, hkkp;  // index 1..N
    bool kp_iso = false;        // KP -> C(dual P) bijective operad map
    bool cb_to_kk_iso = false;  // bijective operad map
    bool composite_iso = false; // WP -> CBP -> KKP bijective operad map
    bool homology_equal = false;
    std::vector<std::string> witnesses;
    bool ok() const { return kp_iso && cb_to_kk_iso && composite_iso && homology_equal; }
};
DualityReport verify_kk(OperadPtr p);
nlohmann::json to_json(const DualityReport& r);

} // namespace opdual
