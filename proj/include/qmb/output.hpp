// output.hpp: CSV emission. Numbers are written in scientific notation with
// 12 significant digits via std::to_chars, so output is locale-independent
// and byte-stable.

#pragma once

#include "qmb/spectrum.hpp"
#include "qmb/sweeps.hpp"

#include <optional>
#include <string>
#include <vector>

namespace qmb {

std::string format_number(double v);
std::string format_number(const std::optional<double>& v);

extern const char* const kRowHeader;
extern const char* const kGammaGridHeader;
extern const char* const kGammaMinimaHeader;
extern const char* const kSpectrumHeader;
extern const char* const kCrossoverHeader;

std::string rows_csv(const std::vector<SweepRow>& rows);
std::string gamma_grid_csv(const GammaScan& scan);
std::string gamma_minima_csv(const GammaScan& scan);

struct SpectrumRow {
    double chi = 0.0;
    EigenSystem eig;
};
std::string spectrum_csv(const std::vector<SpectrumRow>& rows);

struct CrossoverRow {
    SweepAxis axis = SweepAxis::Chi;
    Crossover result;
    std::optional<double> estimate;  ///< chi_c or alpha_c
};
std::string crossover_csv(const CrossoverRow& row);

} // namespace qmb
