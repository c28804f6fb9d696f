#include "charm/scenario.hpp"

#include <map>

namespace charm {

namespace {

// Embedded copies of scenarios/*.json (the shipped verify corpus).
const char* k_trivial = R"CORPUS({
  "name": "trivial-group",
  "semicircle_config": {
    "semicircles": [
      {
        "index": 0,
        "center": 0.0,
        "radius": 1.0
      }
    ],
    "truncation": {
      "max_word_length": 2,
      "target_tail": 1e-09,
      "element_cap": 4000000
    }
  },
  "checks": [
    "trivial_closed_forms",
    "certificates",
    "conditions",
    "density",
    "log_poisson",
    "boundary_identities"
  ],
  "zstar": {
    "re": 0.0,
    "im": 1.0
  },
  "seed": 101
}
)CORPUS";

const char* k_pair = R"CORPUS({
  "name": "pair",
  "semicircle_config": {
    "semicircles": [
      {
        "index": 0,
        "center": 0.0,
        "radius": 1.0
      },
      {
        "index": 1,
        "center": 3.0,
        "radius": 1.0
      }
    ],
    "truncation": {
      "max_word_length": 12,
      "target_tail": 1e-09,
      "element_cap": 4000000
    }
  },
  "checks": [
    "automorphy",
    "certificates",
    "conditions",
    "eta_character",
    "boundary_identities",
    "density",
    "log_poisson"
  ],
  "zstar": {
    "re": 0.0,
    "im": 1.0
  },
  "seed": 102
}
)CORPUS";

const char* k_triple = R"CORPUS({
  "name": "triple-symmetric",
  "semicircle_config": {
    "semicircles": [
      {
        "index": 0,
        "center": 0.0,
        "radius": 1.0
      },
      {
        "index": 1,
        "center": 3.5,
        "radius": 1.0
      },
      {
        "index": 2,
        "center": -3.5,
        "radius": 1.0
      }
    ],
    "truncation": {
      "max_word_length": 10,
      "target_tail": 1e-09,
      "element_cap": 4000000
    }
  },
  "levels": [
    [
      0
    ],
    [
      0,
      1
    ],
    [
      0,
      1,
      2
    ]
  ],
  "checks": [
    "automorphy",
    "divisor_chain",
    "certificates",
    "conditions",
    "eta_character"
  ],
  "zstar": {
    "re": 0.0,
    "im": 1.0
  },
  "seed": 103
}
)CORPUS";

const char* k_geometric = R"CORPUS({
  "name": "geometric-radii",
  "semicircle_config": {
    "semicircles": [
      {
        "index": 0,
        "center": 0.0,
        "radius": 1.0
      },
      {
        "index": 1,
        "center": 3.5,
        "radius": 0.25
      },
      {
        "index": 2,
        "center": 5.0,
        "radius": 0.0625
      },
      {
        "index": 3,
        "center": 6.5,
        "radius": 0.015625
      },
      {
        "index": 4,
        "center": 8.0,
        "radius": 0.00390625
      }
    ],
    "truncation": {
      "max_word_length": 6,
      "target_tail": 1e-09,
      "element_cap": 4000000
    }
  },
  "levels": [
    [
      0
    ],
    [
      0,
      1
    ],
    [
      0,
      1,
      2
    ],
    [
      0,
      1,
      2,
      3
    ],
    [
      0,
      1,
      2,
      3,
      4
    ]
  ],
  "checks": [
    "divisor_chain",
    "convergence_tracking",
    "conditions",
    "certificates"
  ],
  "zstar": {
    "re": 0.0,
    "im": 1.0
  },
  "seed": 104
}
)CORPUS";

const char* k_one_gap_cross = R"CORPUS({
  "name": "one-gap-cross-check",
  "semicircle_config": {
    "semicircles": [
      {
        "index": 0,
        "center": 0.0,
        "radius": 1.0
      }
    ],
    "truncation": {
      "max_word_length": 2,
      "target_tail": 1e-09,
      "element_cap": 4000000
    }
  },
  "gap_system": {
    "gaps": [
      {
        "a": -1.0,
        "b": 1.0
      }
    ],
    "lambda_star": -0.5
  },
  "checks": [
    "one_gap_cross_check",
    "akhiezer_levin",
    "comb_solve"
  ],
  "seed": 105
}
)CORPUS";

const char* k_two_gap = R"CORPUS({
  "name": "two-gap-symmetric",
  "gap_system": {
    "gaps": [
      {
        "a": -3.0,
        "b": -1.0
      },
      {
        "a": 1.0,
        "b": 3.0
      }
    ],
    "lambda_star": -2.0
  },
  "checks": [
    "comb_solve",
    "comb_dual_path",
    "akhiezer_levin"
  ],
  "seed": 106
}
)CORPUS";

const char* k_cos_family = R"CORPUS({
  "name": "cos-half-family",
  "gap_system": {
    "gaps": [
      {
        "a": -26.17993877991494,
        "b": -24.08554367752175
      },
      {
        "a": -23.03834612632515,
        "b": -20.943951023931955
      },
      {
        "a": -19.896753472735355,
        "b": -17.802358370342162
      },
      {
        "a": -16.755160819145562,
        "b": -14.660765716752367
      },
      {
        "a": -13.61356816555577,
        "b": -11.519173063162574
      },
      {
        "a": -10.471975511965978,
        "b": -8.377580409572781
      },
      {
        "a": -7.330382858376184,
        "b": -5.235987755982989
      },
      {
        "a": -4.1887902047863905,
        "b": -2.0943951023931957
      },
      {
        "a": -1.0471975511965976,
        "b": 1.0471975511965976
      },
      {
        "a": 2.0943951023931957,
        "b": 4.1887902047863905
      },
      {
        "a": 5.235987755982989,
        "b": 7.330382858376184
      },
      {
        "a": 8.377580409572781,
        "b": 10.471975511965978
      },
      {
        "a": 11.519173063162574,
        "b": 13.61356816555577
      },
      {
        "a": 14.660765716752367,
        "b": 16.755160819145562
      },
      {
        "a": 17.802358370342162,
        "b": 19.896753472735355
      },
      {
        "a": 20.943951023931955,
        "b": 23.03834612632515
      }
    ],
    "lambda_star": -0.3
  },
  "checks": [
    "widom_trend",
    "comb_solve",
    "akhiezer_levin"
  ],
  "seed": 107
}
)CORPUS";

const std::map<std::string, const char*>& corpus() {
    static const std::map<std::string, const char*> c{
        {"trivial", k_trivial},
        {"pair", k_pair},
        {"triple", k_triple},
        {"geometric", k_geometric},
        {"one_gap_cross", k_one_gap_cross},
        {"two_gap", k_two_gap},
        {"cos_family", k_cos_family},
    };
    return c;
}

}  // namespace

std::vector<std::string> builtinScenarioNames() {
    return {"trivial", "pair", "triple", "geometric", "one_gap_cross", "two_gap", "cos_family"};
}

std::string builtinScenarioText(const std::string& name) {
    const auto& c = corpus();
    const auto it = c.find(name);
    if (it == c.end()) throw ConfigError("no builtin scenario named \"" + name + "\"");
    return it->second;
}

}  // namespace charm
