#pragma once

#include "opdual/koszul.hpp"

#include <iosfwd>

namespace opdual {

// Bad command line or input file; the driver exits with status 2.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Operad spec JSON:
// {"field": "Q" | {"p": 2}, "max_arity": N,
//  "terms": {"n": {"basis": [{"name", "degree"}], "d": [[row, col, val]]}},
//  "sigma": {"n": {"s_k": matrix}}, "circ": [{"m", "n", "i", "matrix"}]}
// A matrix is a list of rows; values are integers or "a/b" strings. Arities
// above N (or above the file's max_arity) are ignored.
SymSeq load_symseq_spec(const nlohmann::json& j, int N);
OperadPtr load_operad_spec(const nlohmann::json& j, int N);
nlohmann::json read_json_file(const std::string& path);
// builtin name | trivial:<file> | free:<file> | file:<path>, optionally
// followed by "<=n" (or "≤n").
OperadPtr select_operad(const std::string& selector, const Field& F, int N);

struct Command {
    std::string verb;   // trees bar cobar w koszul kk check
    std::string what;   // for check: axioms theta w kk quasi adjunction
    std::string operad = "com";
    int max_arity = 4;
    std::string field = "q";
    bool homology = false;
    std::string out = "json";
    unsigned seed = 1;
    bool verbose = false;
};

// Runs the command and writes the report. Returns 0 when every check passes,
// 1 when one fails; throws InputError for bad input.
int run(const Command& c, std::ostream& out);

// argv front end; returns the process exit status.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

} // namespace opdual
