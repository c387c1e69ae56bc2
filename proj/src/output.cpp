#include "qmb/output.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

namespace qmb {

const char* const kRowHeader =
    "chi,alpha,gamma,d_bare,d_dressed,d_nalpha2,d_nalpha2_snr,"
    "lo_bare,lo_dressed,lo_nalpha2,lo_nalpha2_snr,"
    "hi_bare,hi_dressed,hi_nalpha2,hi_nalpha2_snr,"
    "status_bare,status_dressed,status_nalpha2,status_nalpha2_snr";
const char* const kGammaGridHeader = "chi,alpha,gamma,d_gamma,lo_gamma,hi_gamma,status_gamma";
const char* const kGammaMinimaHeader =
    "chi,alpha,gamma_nalpha2,d_nalpha2,gamma_grid_min,d_grid_min,gamma_refined,d_refined,tie,"
    "experimental,status";
const char* const kSpectrumHeader = "chi,n,gamma,E1,E2,E3,E4";
const char* const kCrossoverHeader = "axis,value,lo,hi,estimate,evaluations";

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) v = 0.0;  // drop the sign of -0
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::scientific, 11);
    return std::string(buf, res.ptr);
}

std::string format_number(const std::optional<double>& v) { return v ? format_number(*v) : "nan"; }

namespace {

const char* row_status(const SweepRow& row, const DiamondResult& r) {
    return row.error.empty() ? to_string(r.status) : "failed";
}

std::string failed_or(const SweepRow& row, double v) { return row.error.empty() ? format_number(v) : "nan"; }

} // namespace

std::string rows_csv(const std::vector<SweepRow>& rows) {
    std::ostringstream out;
    out << kRowHeader << '\n';
    for (const auto& row : rows) {
        const DiamondResult* rs[] = {&row.bare, &row.dressed, &row.nalpha2, &row.nalpha2_snr};
        out << format_number(row.chi) << ',' << format_number(row.alpha) << ',' << format_number(row.gamma);
        for (const auto* r : rs) out << ',' << failed_or(row, r->value);
        for (const auto* r : rs) out << ',' << failed_or(row, r->lower_cert);
        for (const auto* r : rs) out << ',' << failed_or(row, r->upper_cert);
        for (const auto* r : rs) out << ',' << row_status(row, *r);
        out << '\n';
    }
    return out.str();
}

std::string gamma_grid_csv(const GammaScan& scan) {
    std::ostringstream out;
    out << kGammaGridHeader << '\n';
    for (const auto& s : scan.slices) {
        for (std::size_t k = 0; k < s.distances.size(); ++k) {
            const auto& d = s.distances[k];
            out << format_number(s.chi) << ',' << format_number(scan.alpha) << ',' << format_number(s.gammas[k])
                << ',' << format_number(d.value) << ',' << format_number(d.lower_cert) << ','
                << format_number(d.upper_cert) << ',' << to_string(d.status) << '\n';
        }
    }
    return out.str();
}

std::string gamma_minima_csv(const GammaScan& scan) {
    std::ostringstream out;
    out << kGammaMinimaHeader << '\n';
    for (const auto& s : scan.slices) {
        out << format_number(s.chi) << ',' << format_number(scan.alpha) << ',';
        if (!s.error.empty()) {
            out << "nan,nan,nan,nan,nan,nan,0," << (s.experimental ? 1 : 0) << ",failed\n";
            continue;
        }
        bool any_failed = s.at_nalpha2.status == DiamondStatus::Failed;
        for (const auto& d : s.distances) any_failed = any_failed || d.status == DiamondStatus::Failed;
        out << format_number(s.gamma_nalpha2) << ',' << format_number(s.at_nalpha2.value) << ','
            << format_number(s.grid_argmin) << ',' << format_number(s.grid_min) << ','
            << format_number(s.refined_argmin) << ',' << format_number(s.refined_min) << ','
            << (s.tie ? 1 : 0) << ',' << (s.experimental ? 1 : 0) << ',' << (any_failed ? "failed" : "ok")
            << '\n';
    }
    return out.str();
}

std::string spectrum_csv(const std::vector<SpectrumRow>& rows) {
    std::ostringstream out;
    out << kSpectrumHeader << '\n';
    for (const auto& r : rows) {
        out << format_number(r.chi) << ',' << format_number(r.eig.n) << ',' << format_number(r.eig.gamma);
        for (double e : r.eig.energies) out << ',' << format_number(e);
        out << '\n';
    }
    return out.str();
}

std::string crossover_csv(const CrossoverRow& row) {
    std::ostringstream out;
    out << kCrossoverHeader << '\n';
    out << to_string(row.axis) << ',' << format_number(row.result.value) << ',' << format_number(row.result.lo)
        << ',' << format_number(row.result.hi) << ',' << format_number(row.estimate) << ','
        << row.result.evaluations << '\n';
    return out.str();
}

} // namespace qmb
