#pragma once

// Built-in campaigns. Each is an ordinary config document; `decaylab show-preset <name>`
// prints it as a starting point for custom configs.

#include <string>
#include <vector>

#include "decaylab/campaign.hpp"

namespace decaylab {

struct Preset {
  std::string name;
  std::string summary;  // one line, names the result exercised
  std::string config;   // JSON
};

inline const std::vector<Preset>& presets() {
  static const std::vector<Preset> all{
      {"example5", "example5 check: weighted half-line model function, strip mass against eps^2.5/2.5 (c = 4), with hi",
       R"json({
  "name": "example5",
  "description": "Weighted half-line -x^-1/2 (x^1/2 f')' on (0,3): strip integrals of the model function x^1/2 chi, c = 4",
  "domain": {"generator": "halfline_truncated", "params": [3], "resolution": "1/1024"},
  "operator": {"kind": "one_d_weighted", "sigma": "power(0.5)"},
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 10}, "example5_window": [0.02, 0.2]},
  "checks": ["example5", "hi"]
})json"},
      {"decay-suite", "Strip decay bounds thm4 and thm6 (with lemma3, hi) on all six built-in domains",
       R"json({
  "name": "decay-suite",
  "description": "Strip decay bounds thm4 and thm6 with lemma3 and the Hardy inequality on interval, rectangle, disk, L-shape, slit square and Koch level 2",
  "domains": [
    {"generator": "interval", "params": [1], "resolution": "1/256"},
    {"generator": "rectangle", "params": [1, 1], "resolution": "1/36"},
    {"generator": "disk", "params": [1], "resolution": "1/20"},
    {"generator": "lshape", "params": [2], "resolution": "1/20"},
    {"generator": "slit_square", "params": [1, 0.5], "resolution": "1/36"},
    {"generator": "koch_prefractal", "params": [2], "resolution": "1/72"}
  ],
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 1.5}, "n_max": 10, "random_vectors": 5},
  "checks": ["hi", "thm4", "thm6", "lemma3"]
})json"},
      {"corollary8", "Simply connected planar case (thm4, thm6, cor7) with c = 4 on square and slit square: c0 = 32, c1 = 113.8",
       R"json({
  "name": "corollary8",
  "description": "Simply connected planar domains with c = 4, constants c0 = 32 and c1 = 113.8",
  "domains": [
    {"generator": "rectangle", "params": [1, 1], "resolution": "1/36"},
    {"generator": "slit_square", "params": [1, 0.5], "resolution": "1/36"}
  ],
  "operator": {"c": 4, "a": 0},
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 1.5}, "n_max": 10, "random_vectors": 5},
  "checks": ["thm4", "thm6", "cor7"]
})json"},
      {"interval-shrink", "Eigenvalue shift rate thm11 on (0,1) shrunk to (eps,1-eps): sharp rate eps^1 (c = 2)",
       R"json({
  "name": "interval-shrink",
  "description": "Eigenvalue shift rate on the unit interval: lambda_n(U_eps) - lambda_n(U) for n = 1,2,3, sharp rate 2/c = 1",
  "domain": {"generator": "interval", "params": [1], "resolution": "1/512"},
  "sweep": {"shrink_schedule": {"ratio": 0.5, "floor_cells": 1, "snap": "node"}, "shrink_n": 3, "fit_points": 4},
  "checks": ["thm11"]
})json"},
      {"square-shrink", "Eigenvalue shift rate thm11 for lambda_1 of the unit square shrunk inward by eps (c = 2)",
       R"json({
  "name": "square-shrink",
  "description": "Eigenvalue shift rate on the unit square at h = 1/128: gap of lambda_1 against eps^(2/c)",
  "domain": {"generator": "rectangle", "params": [1, 1], "resolution": "1/128"},
  "sweep": {"shrink_schedule": {"ratio": 0.5, "floor_cells": 1, "snap": "node"}, "shrink_n": 1, "fit_points": 4},
  "checks": ["thm11"]
})json"},
      {"checkerboard-alpha2", "Divergence-form rescaling (thm4, thm6, thm11) with checkerboard alpha = 2: c = 2 alpha = 4",
       R"json({
  "name": "checkerboard-alpha2",
  "description": "Divergence form -div(a grad f) with checkerboard a in {1, 4} on the unit square, d~ = d/2, c = 4",
  "domain": {"generator": "rectangle", "params": [1, 1], "resolution": "1/64"},
  "operator": {"kind": "divergence_form", "coefficient": "checkerboard(2,4)"},
  "sweep": {
    "eps_schedule": {"ratio": 0.5, "floor_cells": 1.5},
    "shrink_eps": ["1/128", "2/128", "3/128", "4/128", "6/128"],
    "shrink_n": 1, "n_max": 10, "random_vectors": 5
  },
  "solver": {"eigenpairs": 40},
  "checks": ["thm4", "thm6", "thm11"]
})json"},
      {"hardy-constants", "Hardy inequality hardy_constant and hi: variational c_num on interval, square and L-shape (c = 2, 2, 4)",
       R"json({
  "name": "hardy-constants",
  "description": "Hardy inequality constants: smallest c with sum |f|^2/d^2 <= c^2 Q(f), convex c = 2 and simply connected c = 4",
  "domains": [
    {"generator": "interval", "params": [1], "resolution": "1/256"},
    {"generator": "rectangle", "params": [1, 1], "resolution": "1/128"},
    {"generator": "lshape", "params": [2], "resolution": "1/32"}
  ],
  "checks": ["hardy_constant", "hi"]
})json"},
      {"halfline-heat", "Half-line heat reference halfline: strip mass against (36 pi)^-1/2 eps^3 t^-3/2",
       R"json({
  "name": "halfline-heat",
  "description": "Half-line Dirichlet heat kernel: exact strip integral of K(t,x,x) against its small-eps asymptotics",
  "sweep": {"halfline_eps": [0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1], "halfline_t": [0.01, 0.03, 0.1, 0.3, 1, 3, 10]},
  "checks": ["halfline"]
})json"},
      {"square-heat", "Heat kernel strip bound ker2 on the unit square against c0 eps^3 sum e^-lt l^3/2",
       R"json({
  "name": "square-heat",
  "description": "Heat kernel strip bound on the unit square at h = 1/128 with the lowest 80 eigenpairs",
  "domain": {"generator": "rectangle", "params": [1, 1], "resolution": "1/128"},
  "sweep": {"eps": ["12.5/128", "5.5/128", "2.5/128", "1.5/128"], "t": [0.05, 0.1, 0.5, 1]},
  "solver": {"eigenpairs": 80},
  "checks": ["ker2"]
})json"},
      {"interval-heat", "Heat kernel bounds ker2 and ker1 on (0,1): t-exponent -3/2 of the strip mass against the bound's -2",
       R"json({
  "name": "interval-heat",
  "description": "Heat kernel strip mass t-dependence on (0,1) at h = 1/1024: fitted -3/2 against the bound's -2, plus the single-source kernel bound",
  "domain": {"generator": "interval", "params": [1], "resolution": "1/1024"},
  "sweep": {"eps": ["10.5/1024", "20.5/1024", "40.5/1024", "80.5/1024"], "t": [0.01, 0.02, 0.04, 0.08], "ker1_nodes": 3},
  "checks": ["ker2", "ker1"]
})json"},
      {"square-density", "Spectral counting bound thm16: strip counting on the unit square with N(lambda) = 1, 4, 10",
       R"json({
  "name": "square-density",
  "description": "Strip spectral counting on the unit square at h = 1/64: N(eps, lambda) and the projection norm for lambda = 3.5, 9, 17.5 pi^2",
  "domain": {"generator": "rectangle", "params": [1, 1], "resolution": "1/64"},
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 1.5}, "lambda": [34.5436, 88.8264, 172.7181]},
  "solver": {"eigenpairs": 30},
  "checks": ["thm16"]
})json"},
      {"koch-weyl", "Weyl bracket weyl and eigenfunction decay cor7 on the level-2 Koch snowflake (c = 4)",
       R"json({
  "name": "koch-weyl",
  "description": "Fractal boundary: Weyl bracket a1 n <= lambda_n <= a2 n and eigenfunction strip bounds on Koch level 2",
  "domain": {"generator": "koch_prefractal", "params": [2], "resolution": "1/72"},
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 1.5}, "n_max": 10},
  "checks": ["weyl", "cor7"]
})json"},
      {"cutoff-lemmas", "Auxiliary bounds lemma1, lemma2, lemma3, lemma9_10 and cor5 on the disk and L-shape",
       R"json({
  "name": "cutoff-lemmas",
  "description": "Commutator, cutoff and weighted-mass lemmas (lemma1, lemma2, lemma3, lemma9_10, cor5) on the disk and L-shape",
  "domains": [
    {"generator": "disk", "params": [1], "resolution": "1/20"},
    {"generator": "lshape", "params": [2], "resolution": "1/20"}
  ],
  "sweep": {"eps_schedule": {"ratio": 0.5, "floor_cells": 1.5}, "n_max": 5, "random_vectors": 3},
  "checks": ["lemma1", "lemma2", "lemma3", "lemma9_10", "cor5"]
})json"},
  };
  return all;
}

inline const Preset& find_preset(const std::string& name) {
  for (const auto& p : presets())
    if (p.name == name) return p;
  std::string known;
  for (const auto& p : presets()) known += (known.empty() ? "" : ", ") + p.name;
  detail::fail(ErrorKind::config, "unknown preset '" + name + "' (known: " + known + ")");
}

inline Campaign preset_campaign(const std::string& name) { return parse_campaign_text(find_preset(name).config); }

}  // namespace decaylab
