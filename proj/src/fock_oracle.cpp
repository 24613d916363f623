// Copyright 2026 The fiberloop Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fiberloop/fock_oracle.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "fiberloop/permanent.hpp"

namespace fiberloop {

namespace {

double factorial(unsigned k) {
    double f = 1.0;
    for (unsigned i = 2; i <= k; ++i) {
        f *= i;
    }
    return f;
}

void fill_basis(std::size_t mode, std::size_t left, Occupation& current,
                std::vector<Occupation>& out) {
    if (mode + 1 == current.size()) {
        current[mode] = static_cast<unsigned>(left);
        out.push_back(current);
        return;
    }
    for (std::size_t k = left + 1; k-- > 0;) {
        current[mode] = static_cast<unsigned>(k);
        fill_basis(mode + 1, left - k, current, out);
    }
}

}  // namespace

std::size_t basis_size(std::size_t m, std::size_t n) {
    if (m == 0) {
        return n == 0 ? 1 : 0;
    }
    // C(m+n-1, n) built incrementally; each partial value is itself a binomial.
    std::size_t result = 1;
    for (std::size_t k = 1; k <= n; ++k) {
        std::size_t factor = m - 1 + k;
        if (result > std::numeric_limits<std::size_t>::max() / factor) {
            return std::numeric_limits<std::size_t>::max();
        }
        result = result * factor / k;
    }
    return result;
}

FockBasis enumerate_basis(std::size_t m, std::size_t n, std::size_t cap) {
    if (m == 0) {
        throw std::invalid_argument("Fock basis needs at least one mode");
    }
    std::size_t size = basis_size(m, n);
    if (size > cap) {
        throw std::invalid_argument("Fock basis of size " + std::to_string(size) +
                                    " exceeds the cap " + std::to_string(cap));
    }
    FockBasis basis{m, n, {}};
    basis.states.reserve(size);
    Occupation current(m, 0);
    fill_basis(0, n, current, basis.states);
    return basis;
}

Complex output_amplitude(const ComplexMatrix& u, std::span<const unsigned> in,
                         std::span<const unsigned> out) {
    if (u.rows() != u.cols() || in.size() != static_cast<std::size_t>(u.rows()) ||
        out.size() != in.size()) {
        throw std::invalid_argument("occupation lengths do not match the map");
    }
    std::vector<Eigen::Index> rows, cols;
    double norm = 1.0;
    for (std::size_t i = 0; i < in.size(); ++i) {
        rows.insert(rows.end(), in[i], static_cast<Eigen::Index>(i));
        cols.insert(cols.end(), out[i], static_cast<Eigen::Index>(i));
        norm *= factorial(in[i]) * factorial(out[i]);
    }
    if (rows.size() != cols.size()) {
        throw std::invalid_argument("input and output photon numbers differ");
    }
    auto n = static_cast<Eigen::Index>(rows.size());
    ComplexMatrix sub(n, n);
    for (Eigen::Index a = 0; a < n; ++a) {
        for (Eigen::Index b = 0; b < n; ++b) {
            sub(a, b) = u(rows[static_cast<std::size_t>(a)], cols[static_cast<std::size_t>(b)]);
        }
    }
    return permanent(sub) / std::sqrt(norm);
}

Complex output_amplitude(const TransferMatrix& u, std::span<const unsigned> in,
                         std::span<const unsigned> out) {
    return output_amplitude(u.matrix(), in, out);
}

ComplexMatrix unitary_dilation(const ComplexMatrix& a) {
    Eigen::JacobiSVD<ComplexMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const Eigen::Index m = a.rows();
    std::vector<Eigen::Index> lossy;
    for (Eigen::Index k = 0; k < m; ++k) {
        if (s(k) > 1.0 + 1e-9) {
            throw std::invalid_argument("map is not a contraction");
        }
        if (s(k) < 1.0 - 1e-12) {
            lossy.push_back(k);
        }
    }
    const auto r = static_cast<Eigen::Index>(lossy.size());
    const Eigen::Index d = m + r;

    // Diagonal core: s_k on system modes, a beamsplitter [[s, t], [t, -s]]
    // coupling each lossy singular mode to its own ancilla.
    ComplexMatrix core = ComplexMatrix::Zero(d, d);
    for (Eigen::Index k = 0; k < m; ++k) {
        core(k, k) = std::min(s(k), 1.0);
    }
    for (Eigen::Index a_idx = 0; a_idx < r; ++a_idx) {
        Eigen::Index k = lossy[static_cast<std::size_t>(a_idx)];
        double sk = s(k);
        double tk = std::sqrt(std::max(0.0, 1.0 - sk * sk));
        core(k, m + a_idx) = tk;
        core(m + a_idx, k) = tk;
        core(m + a_idx, m + a_idx) = -sk;
    }
    ComplexMatrix left = ComplexMatrix::Identity(d, d);
    ComplexMatrix right = ComplexMatrix::Identity(d, d);
    left.topLeftCorner(m, m) = svd.matrixU();
    right.topLeftCorner(m, m) = svd.matrixV().adjoint();
    return left * core * right;
}

double postselection_oracle(const TransferMatrix& lossy, std::span<const unsigned> in) {
    const std::size_t m = lossy.modes();
    if (in.size() != m) {
        throw std::invalid_argument("occupation length does not match the mode count");
    }
    ComplexMatrix big = unitary_dilation(lossy.matrix());
    const auto d = static_cast<std::size_t>(big.rows());
    const std::size_t n = std::accumulate(in.begin(), in.end(), std::size_t{0});

    Occupation padded(in.begin(), in.end());
    padded.resize(d, 0);
    FockBasis basis = enumerate_basis(d, n);
    double kept = 0.0;
    double total = 0.0;
    for (const auto& out : basis.states) {
        double p = std::norm(output_amplitude(big, padded, out));
        total += p;
        bool no_loss = true;
        for (std::size_t k = m; k < d && no_loss; ++k) {
            no_loss = out[k] == 0;
        }
        if (no_loss) {
            kept += p;
        }
    }
    if (std::abs(total - 1.0) > 1e-9) {
        throw std::logic_error("dilated output distribution does not normalize");
    }
    return kept;
}

}  // namespace fiberloop
