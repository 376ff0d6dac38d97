#pragma once

#include "besselharm/grid.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace bh {

struct ExperimentRecipe {
    std::string id;
    std::vector<double> lambdas;
    std::vector<double> betas;
    std::vector<double> ps;
    std::string space = "R";  // "R", "l2:<n>", "lq:<n>:<q>" (q may be "inf")
    GridConfig grid;
    std::uint64_t seed = 20240611;
    int corpus_count = 10;
    std::map<std::string, double> tolerances;

    double tol(const std::string& key, double fallback) const;
};

struct ReportRow {
    std::string experiment_id;
    std::string param_json;
    double value = 0.0;
    double oracle = 0.0;
    double residual = 0.0;
    double tolerance = 0.0;  // +inf for logged rows
    bool pass = false;
    double runtime_s = 0.0;
    std::string reason;
};

struct RecipeInfo {
    std::string id;
    std::string subcommand;  // transform, semigroup, gfunction, multiplier, probe
    bool acceptance;         // one of the twelve acceptance criteria
    int criterion;           // 1..12, or 0
    std::string summary;
};

const std::vector<RecipeInfo>& list_recipes();
// Built-in recipe with its default parameters; throws on unknown ids.
ExperimentRecipe builtin_recipe(const std::string& id);
// Diagnostics; empty when the recipe is valid.
std::vector<std::string> validate(const ExperimentRecipe& r);
// Rows in declaration order. Invalid recipes and module errors surface as
// failed rows with the reason filled in.
std::vector<ReportRow> run_recipe(const ExperimentRecipe& r);

// "R", "l2:4", "lq:8:4", "lq:3:inf".
FiniteBanachSpace parse_space(const std::string& s);

// Flat "key = value" text; '#' starts a comment.
std::map<std::string, std::string> parse_config(const std::string& text);
// Overrides recipe fields from config keys: lambdas, betas, ps (comma lists),
// space, seed, corpus_count, tol.<name>, and the grid keys.
void apply_config(ExperimentRecipe& r, const std::map<std::string, std::string>& kv);

// CSV with header experiment_id,param_json,value,oracle,residual,pass,runtime_s.
// With timing off the runtime column is written as 0 so equal seeds give
// byte-identical files.
std::string report_csv(const std::vector<ReportRow>& rows, bool timing = true);
std::string report_metadata_json(const std::vector<ExperimentRecipe>& recipes, const std::vector<ReportRow>& rows);

}  // namespace bh
