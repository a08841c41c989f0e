// matrix_file.cpp - reader/writer for sampled Hamiltonian files and the interpolating model

#include "adlab/matrix_file.hpp"

#include "adlab/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>

namespace adlab {

namespace {

struct Field {
    std::string_view text;
    std::size_t column;  // 1-based
};

std::vector<Field> split_fields(const std::string& line) {
    std::vector<Field> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        const std::size_t stop = comma == std::string::npos ? line.size() : comma;
        std::size_t a = start, b = stop;
        while (a < b && std::isspace(static_cast<unsigned char>(line[a]))) ++a;
        while (b > a && std::isspace(static_cast<unsigned char>(line[b - 1]))) --b;
        out.push_back({std::string_view(line).substr(a, b - a), a + 1});
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return out;
}

double to_double(const Field& f, std::size_t line) {
    double v = 0;
    const char* first = f.text.data();
    const char* last = first + f.text.size();
    if (f.text.empty()) throw ParseError(line, f.column, "empty field");
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last) {
        throw ParseError(line, f.column, "not a number: '" + std::string(f.text) + "'");
    }
    if (!std::isfinite(v)) throw ParseError(line, f.column, "non-finite value");
    return v;
}

long long to_integer(const Field& f, std::size_t line) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(f.text.data(), f.text.data() + f.text.size(), v);
    if (f.text.empty() || ec != std::errc() || ptr != f.text.data() + f.text.size()) {
        throw ParseError(line, f.column, "expected an integer: '" + std::string(f.text) + "'");
    }
    return v;
}

bool skippable(const std::string& line) {
    for (char c : line) {
        if (c == '#') return true;
        if (!std::isspace(static_cast<unsigned char>(c))) return false;
    }
    return true;
}

}  // namespace

SampledMatrices parse_matrix_samples(std::istream& in, double hermiticity_tol) {
    SampledMatrices data;
    std::string line;
    std::size_t lineno = 0;
    bool have_header = false;
    long long expected = 0;
    double t0 = 0, t1 = 0;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (skippable(line)) continue;
        const auto fields = split_fields(line);
        if (!have_header) {
            if (fields.size() != 4) throw ParseError(lineno, 1, "header must be: dimension, samples, t_start, t_end");
            const long long n = to_integer(fields[0], lineno);
            expected = to_integer(fields[1], lineno);
            t0 = to_double(fields[2], lineno);
            t1 = to_double(fields[3], lineno);
            if (n < 1) throw ParseError(lineno, fields[0].column, "dimension must be >= 1");
            if (expected < 2) throw ParseError(lineno, fields[1].column, "need at least 2 samples");
            if (!(t1 > t0)) throw ParseError(lineno, fields[3].column, "t_end must exceed t_start");
            data.dimension = static_cast<Index>(n);
            data.grid = TimeGrid<double>(t0, t1, static_cast<Index>(expected - 1));
            have_header = true;
            continue;
        }
        const Index N = data.dimension;
        const std::size_t want = static_cast<std::size_t>(2 * N * N);
        if (static_cast<long long>(data.samples.size()) >= expected) {
            throw ParseError(lineno, 1, "more sample rows than declared (" + std::to_string(expected) + ")");
        }
        if (fields.size() != want) {
            const std::size_t col = fields.size() > want ? fields[want].column : line.size() + 1;
            throw ParseError(lineno, col,
                             "expected " + std::to_string(want) + " values, found " + std::to_string(fields.size()));
        }
        CMatrix<double> H(N, N);
        for (Index r = 0; r < N; ++r) {
            for (Index c = 0; c < N; ++c) {
                const std::size_t at = static_cast<std::size_t>(2 * (r * N + c));
                H(r, c) = {to_double(fields[at], lineno), to_double(fields[at + 1], lineno)};
            }
        }
        const double t = data.grid[static_cast<Index>(data.samples.size())];
        const double res = hermiticity_residual(H);
        if (res > hermiticity_tol) throw NotHermitian(t, res);
        data.samples.push_back(std::move(H));
    }
    if (!have_header) throw ParseError(lineno + 1, 1, "missing header line");
    if (static_cast<long long>(data.samples.size()) != expected) {
        throw ParseError(lineno + 1, 1,
                         "declared " + std::to_string(expected) + " samples, found " +
                             std::to_string(data.samples.size()));
    }
    return data;
}

HamiltonianModel<double> make_interpolated_model(SampledMatrices data) {
    auto shared = std::make_shared<const SampledMatrices>(std::move(data));
    const Index N = shared->dimension;
    return HamiltonianModel<double>(
        N,
        [shared](double t) {
            const auto& g = shared->grid;
            const double slack = 1e-9 * g.dt();
            if (t < g.start() - slack || t > g.end() + slack) {
                throw std::out_of_range("matrix_file model: t=" + std::to_string(t) + " outside the sampled range [" +
                                        std::to_string(g.start()) + ", " + std::to_string(g.end()) + "]");
            }
            const double x = std::clamp((t - g.start()) / g.dt(), 0.0, static_cast<double>(g.steps()));
            const Index k = std::min(static_cast<Index>(x), g.steps() - 1);
            const double w = x - static_cast<double>(k);
            const auto& a = shared->samples[static_cast<std::size_t>(k)];
            const auto& b = shared->samples[static_cast<std::size_t>(k + 1)];
            return CMatrix<double>((1 - w) * a + w * b);
        },
        "matrix_file");
}

HamiltonianModel<double> load_matrix_model(const std::filesystem::path& path, double hermiticity_tol) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open matrix file " + path.string());
    return make_interpolated_model(parse_matrix_samples(in, hermiticity_tol));
}

void write_matrix_samples(std::ostream& out, const HamiltonianModel<double>& model, const TimeGrid<double>& grid,
                          int digits) {
    const Index N = model.dimension();
    char buf[64];
    auto put = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.*g", digits, v);
        out << buf;
    };
    out << "# dimension, samples, t_start, t_end\n" << N << ", " << grid.size() << ", ";
    put(grid.start());
    out << ", ";
    put(grid.end());
    out << '\n';
    for (Index k = 0; k < grid.size(); ++k) {
        const CMatrix<double> H = model(grid[k]);
        for (Index r = 0; r < N; ++r) {
            for (Index c = 0; c < N; ++c) {
                if (r || c) out << ", ";
                put(H(r, c).real());
                out << ", ";
                put(H(r, c).imag());
            }
        }
        out << '\n';
    }
}

}  // namespace adlab
