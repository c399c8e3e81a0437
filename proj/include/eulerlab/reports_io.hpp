#ifndef EULERLAB_REPORTS_IO_HPP
#define EULERLAB_REPORTS_IO_HPP

#include <cstdio>
#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "dynamics.hpp"
#include "flow_map.hpp"
#include "norms.hpp"
#include "stability.hpp"

namespace eulerlab {

namespace detail {

// %.17g round-trips doubles exactly and is stable run to run, which the
// byte-reproducibility contract of the reports depends on.
inline std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

}  // namespace detail

inline void write_ledger_csv(const ConservationLedger& ledger, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "t,l1,l2,linf,mean,energy,holder\n";
    for (const LedgerRow& r : ledger.rows)
        out << detail::fmt(r.t) << ',' << detail::fmt(r.l1) << ',' << detail::fmt(r.l2) << ','
            << detail::fmt(r.linf) << ',' << detail::fmt(r.mean) << ',' << detail::fmt(r.energy)
            << ',' << detail::fmt(r.holder) << '\n';
}

inline void write_stability_csv(const StabilityReport& report, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "t,dl1,dl2,dlinf,dhm1,dhbeta,du_l2,residual_proof1,gap_proof3,c_measured\n";
    for (const StabilityRow& r : report.rows)
        out << detail::fmt(r.t) << ',' << detail::fmt(r.dl1) << ',' << detail::fmt(r.dl2) << ','
            << detail::fmt(r.dlinf) << ',' << detail::fmt(r.dhm1) << ',' << detail::fmt(r.dhbeta)
            << ',' << detail::fmt(r.du_l2) << ',' << detail::fmt(r.residual_interpolation) << ','
            << detail::fmt(r.gap_duality) << ',' << detail::fmt(r.c_measured) << '\n';
}

inline void write_flow_sample_csv(const FlowSample& sample, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "x,y,X0x,X0y\n";
    for (std::size_t k = 0; k < sample.points.size(); ++k)
        out << detail::fmt(sample.points[k].x) << ',' << detail::fmt(sample.points[k].y) << ','
            << detail::fmt(sample.preimages[k].x) << ',' << detail::fmt(sample.preimages[k].y)
            << '\n';
}

inline void write_refinement_csv(const RefinementReport& report, const std::string& path) {
    std::ofstream out = detail::open_out(path);
    out << "parameter,initial_error,sup_error\n";
    for (const RefinementRow& r : report.rows)
        out << detail::fmt(r.parameter) << ',' << detail::fmt(r.initial_error) << ','
            << detail::fmt(r.sup_error) << '\n';
}

inline nlohmann::json stability_summary_json(const StabilityReport& r) {
    nlohmann::json j;
    j["alpha"] = r.alpha;
    j["beta"] = r.beta;
    j["delta"] = r.delta;
    j["gamma_theory"] = r.gamma_theory;
    j["elliptic_constant"] = r.elliptic_constant;
    j["hbeta_growth"] = r.hbeta_growth;
    j["final_dl2"] = r.rows.empty() ? 0.0 : r.rows.back().dl2;
    j["checks"] = {{"interpolation", r.interpolation_ok},
                   {"energy", r.energy_ok},
                   {"duality", r.duality_ok},
                   {"elliptic", r.elliptic_ok},
                   {"chain", r.chain_ok}};
    j["all_checks_ok"] = r.all_checks_ok();
    return j;
}

inline nlohmann::json norm_report_json(const NormReport& r) {
    nlohmann::json j;
    j["l1"] = r.l1;
    j["l2"] = r.l2;
    j["linf"] = r.linf;
    j["hminus1"] = nullptr;
    j["hbeta"] = nullptr;
    for (const auto& [order, value] : r.hs_values) {
        if (order == -1.0)
            j["hminus1"] = value;
        else
            j["hbeta"] = value;
    }
    if (r.holder_seminorm)
        j["holder"] = *r.holder_seminorm;
    else
        j["holder"] = nullptr;
    return j;
}

}  // namespace eulerlab

#endif
