#pragma once

#include "ksf/experiment/statistics.hpp"
#include "ksf/io/canonical_json.hpp"

namespace ksf::io {

inline Json to_json(const ExperimentReport& r) {
    Json triads = Json::array();
    for (const TriadStatistics& t : r.triads) {
        triads.push_back({{"index", t.index},
                          {"members", {t.members[0], t.members[1], t.members[2]}},
                          {"sum_counts", t.tally.sum_counts},
                          {"no_click", t.tally.no_click},
                          {"trials", t.tally.trials()},
                          {"failures", t.failures},
                          {"denominator", t.denominator},
                          {"epsilon_hat", t.epsilon_hat},
                          {"upper_bound", t.upper_bound}});
    }
    Json j{{"mode", r.mode},
           {"set", r.set_name},
           {"N", r.n_triads},
           {"alpha", r.alpha},
           {"no_click_policy", std::string(to_string(r.policy))},
           {"triads", triads},
           {"epsilon_max", r.epsilon_max},
           {"u_max", r.u_max},
           {"threshold", r.threshold},
           {"verdict", std::string(to_string(r.verdict))},
           {"config_digest", r.config_digest}};
    j["trials_per_triad"] = r.trials_per_triad ? Json(*r.trials_per_triad) : Json(nullptr);
    j["seed"] = r.seed ? Json(*r.seed) : Json(nullptr);
    return j;
}

}  // namespace ksf::io
