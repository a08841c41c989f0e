// matrix_file.hpp - plain-text sampled Hamiltonians and a linearly interpolating model over them
//
// Layout (comma separated, '#' starts a comment line, blank lines ignored):
//   N, K, t_start, t_end                      header: dimension, sample count, uniform sample grid
//   re(0,0), im(0,0), re(0,1), im(0,1), ...   K rows of 2 N^2 numbers, row-major

#pragma once

#include "adlab/models.hpp"
#include "adlab/types.hpp"

#include <filesystem>
#include <iosfwd>
#include <vector>

namespace adlab {

struct SampledMatrices {
    Index dimension = 0;
    TimeGrid<double> grid{0.0, 1.0, 1};
    std::vector<CMatrix<double>> samples;
};

// Throws ParseError (line, column) on malformed input and NotHermitian on a non-Hermitian sample.
SampledMatrices parse_matrix_samples(std::istream& in, double hermiticity_tol = 1e-12);

HamiltonianModel<double> make_interpolated_model(SampledMatrices data);

HamiltonianModel<double> load_matrix_model(const std::filesystem::path& path, double hermiticity_tol = 1e-12);

// Samples `model` on `grid` in the same layout; digits = 17 round-trips doubles exactly.
void write_matrix_samples(std::ostream& out, const HamiltonianModel<double>& model, const TimeGrid<double>& grid,
                          int digits = 17);

}  // namespace adlab
