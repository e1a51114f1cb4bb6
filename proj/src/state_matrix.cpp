#include "boolcd/state_matrix.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "boolcd/format.hpp"

namespace boolcd {

static_assert(std::endian::native == std::endian::little,
              "binary state format is little-endian");

StateMatrix::StateMatrix(Eigen::MatrixXd values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1)
        throw std::invalid_argument("state matrix must be at least 1x1");
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            const double v = values_(i, j);
            if (!std::isfinite(v) || v < 0.0)
                throw std::invalid_argument("state matrix entries must be finite and >= 0");
        }
    for (Eigen::Index j = 0; j < values_.cols(); ++j)
        if (values_.col(j).maxCoeff() == 0.0)
            throw std::invalid_argument("degenerate reservoir: column " + std::to_string(j) +
                                        " is identically zero");
}

void StateMatrix::save_csv(const std::string& path, bool header) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    if (header) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j)
            out << (j ? "," : "") << "node" << j;
        out << "\n";
    }
    for (Eigen::Index i = 0; i < values_.rows(); ++i) {
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            if (j) out << ',';
            out << format_double(values_(i, j));
        }
        out << "\n";
    }
}

StateMatrix StateMatrix::load_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::vector<std::vector<double>> rows;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        bool numeric = true;
        while (std::getline(ss, cell, ',')) {
            try {
                std::size_t used = 0;
                row.push_back(std::stod(cell, &used));
            } catch (const std::exception&) {
                numeric = false;
                break;
            }
        }
        if (first && !numeric) {  // optional header
            first = false;
            continue;
        }
        first = false;
        if (!numeric) throw std::runtime_error("non-numeric row in " + path);
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("no data rows in " + path);
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size())
            throw std::runtime_error("ragged rows in " + path);
        for (std::size_t j = 0; j < rows[i].size(); ++j)
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
    }
    return StateMatrix(std::move(m));
}

void StateMatrix::save_binary(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    out.write("BCD1", 4);
    const std::uint32_t t = static_cast<std::uint32_t>(values_.rows());
    const std::uint32_t n = static_cast<std::uint32_t>(values_.cols());
    out.write(reinterpret_cast<const char*>(&t), 4);
    out.write(reinterpret_cast<const char*>(&n), 4);
    for (Eigen::Index i = 0; i < values_.rows(); ++i)
        for (Eigen::Index j = 0; j < values_.cols(); ++j) {
            const double v = values_(i, j);
            out.write(reinterpret_cast<const char*>(&v), 8);
        }
}

StateMatrix StateMatrix::load_binary(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || std::memcmp(magic.data(), "BCD1", 4) != 0)
        throw std::runtime_error(path + ": bad magic, not a BCD1 state file");
    std::uint32_t t = 0, n = 0;
    in.read(reinterpret_cast<char*>(&t), 4);
    in.read(reinterpret_cast<char*>(&n), 4);
    if (!in || t == 0 || n == 0) throw std::runtime_error(path + ": bad header");
    Eigen::MatrixXd m(t, n);
    for (std::uint32_t i = 0; i < t; ++i)
        for (std::uint32_t j = 0; j < n; ++j) {
            double v = 0;
            in.read(reinterpret_cast<char*>(&v), 8);
            if (!in) throw std::runtime_error(path + ": truncated payload");
            m(i, j) = v;
        }
    return StateMatrix(std::move(m));
}

}  // namespace boolcd
