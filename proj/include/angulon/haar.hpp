#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <cstdint>
#include <exception>
#include <random>
#include <string>
#include <thread>
#include <vector>

#include "angulon/errors.hpp"

namespace angulon {

enum class GroupKind { O, U, Sp };

inline double group_beta(GroupKind g) {
  switch (g) {
    case GroupKind::O: return 0.5;
    case GroupKind::U: return 1.0;
    case GroupKind::Sp: return 2.0;
  }
  return 0;
}

inline std::string group_name(GroupKind g) {
  switch (g) {
    case GroupKind::O: return "O";
    case GroupKind::U: return "U";
    case GroupKind::Sp: return "Sp";
  }
  return "?";
}

inline GroupKind group_from_beta(double beta) {
  if (beta == 0.5) return GroupKind::O;
  if (beta == 1.0) return GroupKind::U;
  if (beta == 2.0) return GroupKind::Sp;
  throw DomainError("Monte Carlo needs beta in {1/2, 1, 2}");
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

/// Independent engine for sample `index` of the stream `seed`.
inline std::mt19937_64 sample_engine(std::uint64_t seed, std::uint64_t index) {
  return std::mt19937_64(splitmix64(seed ^ splitmix64(index + 0x632be59bd9b4e019ull)));
}

using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;

inline RealMatrix sample_orthogonal(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  RealMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) a(i, j) = g(rng);
  Eigen::HouseholderQR<RealMatrix> qr(a);
  RealMatrix q = qr.householderQ();
  const RealMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k)
    if (r(k, k) < 0) q.col(k) *= -1.0;
  return q;
}

inline ComplexMatrix sample_unitary(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  ComplexMatrix a(n, n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double re = g(rng), im = g(rng);
      a(i, j) = {re, im};
    }
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  const ComplexMatrix& r = qr.matrixQR();
  for (int k = 0; k < n; ++k) {
    const double m = std::abs(r(k, k));
    if (m > 0) q.col(k) *= r(k, k) / m;
  }
  return q;
}

/// Quaternion alpha + beta j with complex alpha, beta (so a + bi + cj + dk has
/// alpha = a + bi, beta = c + di).
struct Quaternion {
  std::complex<double> alpha, beta;

  friend Quaternion operator*(const Quaternion& p, const Quaternion& q) {
    return {p.alpha * q.alpha - p.beta * std::conj(q.beta), p.alpha * q.beta + p.beta * std::conj(q.alpha)};
  }
  friend Quaternion operator+(const Quaternion& p, const Quaternion& q) { return {p.alpha + q.alpha, p.beta + q.beta}; }
  friend Quaternion operator-(const Quaternion& p, const Quaternion& q) { return {p.alpha - q.alpha, p.beta - q.beta}; }
  Quaternion conj() const { return {std::conj(alpha), -beta}; }
  double norm2() const { return std::norm(alpha) + std::norm(beta); }
};

/// 2n x 2n complex image of an n x n quaternion matrix; q -> [[alpha, beta], [-conj beta, conj alpha]].
inline ComplexMatrix quaternion_embed(const std::vector<Quaternion>& q, int n) {
  ComplexMatrix m(2 * n, 2 * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Quaternion& e = q[i * n + j];
      m(2 * i, 2 * j) = e.alpha;
      m(2 * i, 2 * j + 1) = e.beta;
      m(2 * i + 1, 2 * j) = -std::conj(e.beta);
      m(2 * i + 1, 2 * j + 1) = std::conj(e.alpha);
    }
  return m;
}

/// n x n quaternion matrix (row-major) with orthonormal columns, from
/// Gram-Schmidt on a quaternionic Gaussian matrix.
inline std::vector<Quaternion> sample_symplectic_quaternions(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::vector<Quaternion> a(n * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      const double a0 = g(rng), a1 = g(rng), a2 = g(rng), a3 = g(rng);
      a[i * n + j] = {{a0, a1}, {a2, a3}};
    }
  for (int k = 0; k < n; ++k) {
    for (int l = 0; l < k; ++l) {
      Quaternion dot{};
      for (int m = 0; m < n; ++m) dot = dot + a[m * n + l].conj() * a[m * n + k];
      for (int m = 0; m < n; ++m) a[m * n + k] = a[m * n + k] - a[m * n + l] * dot;
    }
    double norm = 0;
    for (int m = 0; m < n; ++m) norm += a[m * n + k].norm2();
    norm = std::sqrt(norm);
    for (int m = 0; m < n; ++m) {
      a[m * n + k].alpha /= norm;
      a[m * n + k].beta /= norm;
    }
  }
  return a;
}

inline ComplexMatrix sample_symplectic(int n, std::mt19937_64& rng) {
  return quaternion_embed(sample_symplectic_quaternions(n, rng), n);
}

/// Haar sample as a complex matrix: n x n for O and U, 2n x 2n for Sp.
inline ComplexMatrix sample_haar(GroupKind g, int n, std::mt19937_64& rng) {
  if (n < 1) throw DomainError("group dimension must be >= 1");
  switch (g) {
    case GroupKind::O: return sample_orthogonal(n, rng).cast<std::complex<double>>();
    case GroupKind::U: return sample_unitary(n, rng);
    case GroupKind::Sp: return sample_symplectic(n, rng);
  }
  return {};
}

/// Standard symplectic form diag(J2, ..., J2), J2 = [[0,1],[-1,0]].
inline ComplexMatrix symplectic_form(int n) {
  ComplexMatrix j = ComplexMatrix::Zero(2 * n, 2 * n);
  for (int k = 0; k < n; ++k) {
    j(2 * k, 2 * k + 1) = 1;
    j(2 * k + 1, 2 * k) = -1;
  }
  return j;
}

/// Entry weights ||O_ij||^2 of a Haar sample (quaternion norm for Sp).
inline RealMatrix entry_weights(GroupKind g, const ComplexMatrix& u, int n) {
  RealMatrix w(n, n);
  if (g == GroupKind::Sp) {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w(i, j) = 0.5 * (std::norm(u(2 * i, 2 * j)) + std::norm(u(2 * i, 2 * j + 1)) +
                         std::norm(u(2 * i + 1, 2 * j)) + std::norm(u(2 * i + 1, 2 * j + 1)));
  } else {
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) w(i, j) = std::norm(u(i, j));
  }
  return w;
}

/// Fast path: weights straight from the sampler without building the embedding.
inline RealMatrix sample_weights(GroupKind g, int n, std::mt19937_64& rng) {
  RealMatrix w(n, n);
  switch (g) {
    case GroupKind::O: {
      const RealMatrix q = sample_orthogonal(n, rng);
      w = q.array().square().matrix();
      break;
    }
    case GroupKind::U: {
      const ComplexMatrix q = sample_unitary(n, rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = std::norm(q(i, j));
      break;
    }
    case GroupKind::Sp: {
      const auto q = sample_symplectic_quaternions(n, rng);
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) w(i, j) = q[i * n + j].norm2();
      break;
    }
  }
  return w;
}

struct MCEstimate {
  double mean = 0;
  double stderr_ = 0;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  GroupKind group = GroupKind::U;
  int n = 0;
};

/// A spectrum in floating point for the Monte Carlo oracle.
struct FloatSpectrum {
  std::vector<double> x, y;
};

struct MCRun {
  /// integral[s] for each spectrum; moments[s][i*n+j] for M_ij.
  std::vector<MCEstimate> integral;
  std::vector<std::vector<MCEstimate>> moments;
};

struct MCOptions {
  std::uint64_t samples = 100000;
  std::uint64_t seed = 1;
  unsigned jobs = 1;
  bool with_moments = false;
};

inline constexpr std::uint64_t kMCBlock = 4096;

/// One pass over the samples, shared by every spectrum (and moment). Blocks of
/// kMCBlock samples are summed independently and combined in block order, so
/// the result does not depend on the number of workers.
inline MCRun mc_run(GroupKind g, int n, const std::vector<FloatSpectrum>& spectra, const MCOptions& opt) {
  if (opt.samples < 2) throw DomainError("Monte Carlo needs at least 2 samples");
  for (const auto& s : spectra)
    if (s.x.size() != static_cast<std::size_t>(n) || s.y.size() != static_cast<std::size_t>(n))
      throw DomainError("spectrum size does not match n");
  const std::size_t S = spectra.size();
  const std::size_t per = opt.with_moments ? 1 + static_cast<std::size_t>(n * n) : 1;
  const std::size_t Q = S * per;
  const std::uint64_t blocks = (opt.samples + kMCBlock - 1) / kMCBlock;
  // per block: running mean and sum of squared deviations (Welford)
  std::vector<double> means(blocks * Q, 0.0), m2s(blocks * Q, 0.0);
  std::vector<std::exception_ptr> errors(blocks);

  auto do_block = [&](std::uint64_t b) {
    try {
      const std::uint64_t lo = b * kMCBlock, hi = std::min(opt.samples, lo + kMCBlock);
      double* mu = &means[b * Q];
      double* m2 = &m2s[b * Q];
      auto push = [&](std::size_t q, double v, double count) {
        const double d = v - mu[q];
        mu[q] += d / count;
        m2[q] += d * (v - mu[q]);
      };
      for (std::uint64_t k = lo; k < hi; ++k) {
        const double count = static_cast<double>(k - lo + 1);
        auto rng = sample_engine(opt.seed, k);
        const RealMatrix w = sample_weights(g, n, rng);
        for (std::size_t s = 0; s < S; ++s) {
          double e = 0;
          for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) e += spectra[s].x[i] * spectra[s].y[j] * w(i, j);
          const double f = std::exp(e);
          push(s * per, f, count);
          if (opt.with_moments)
            for (int i = 0; i < n; ++i)
              for (int j = 0; j < n; ++j) push(s * per + 1 + i * n + j, w(i, j) * f, count);
        }
      }
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };

  const unsigned jobs = std::max(1u, opt.jobs);
  if (jobs == 1) {
    for (std::uint64_t b = 0; b < blocks; ++b) do_block(b);
  } else {
    std::atomic<std::uint64_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (std::uint64_t b; (b = next.fetch_add(1)) < blocks;) do_block(b);
      });
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);

  // merge blocks in order (Chan et al.)
  std::vector<double> mean(Q, 0.0), m2(Q, 0.0);
  double count = 0;
  for (std::uint64_t b = 0; b < blocks; ++b) {
    const double nb = static_cast<double>(std::min(opt.samples, (b + 1) * kMCBlock) - b * kMCBlock);
    const double tot = count + nb;
    for (std::size_t q = 0; q < Q; ++q) {
      const double d = means[b * Q + q] - mean[q];
      mean[q] += d * (nb / tot);
      m2[q] += m2s[b * Q + q] + d * d * (count * nb / tot);
    }
    count = tot;
  }
  const double N = static_cast<double>(opt.samples);
  auto estimate = [&](std::size_t q) {
    MCEstimate e;
    e.mean = mean[q];
    e.stderr_ = std::sqrt(std::max(0.0, m2[q] / (N - 1)) / N);
    e.samples = opt.samples;
    e.seed = opt.seed;
    e.group = g;
    e.n = n;
    return e;
  };
  MCRun run;
  for (std::size_t s = 0; s < S; ++s) {
    run.integral.push_back(estimate(s * per));
    std::vector<MCEstimate> m;
    if (opt.with_moments)
      for (int k = 0; k < n * n; ++k) m.push_back(estimate(s * per + 1 + k));
    run.moments.push_back(std::move(m));
  }
  return run;
}

/// Haar-normalized integral of exp(Tr X O Y O^-1).
inline MCEstimate mc_integral(GroupKind g, const FloatSpectrum& s, std::uint64_t samples, std::uint64_t seed,
                              unsigned jobs = 1) {
  if (samples < 100) throw DomainError("mc_integral needs at least 100 samples");
  MCOptions opt{samples, seed, jobs, false};
  return mc_run(g, static_cast<int>(s.x.size()), {s}, opt).integral.front();
}

/// Haar average of ||O_ij||^2 exp(Tr X O Y O^-1) (1-based i, j).
inline MCEstimate mc_moment(GroupKind g, const FloatSpectrum& s, int i, int j, std::uint64_t samples,
                            std::uint64_t seed, unsigned jobs = 1) {
  const int n = static_cast<int>(s.x.size());
  if (i < 1 || i > n || j < 1 || j > n) throw DomainError("moment index out of range");
  if (samples < 100) throw DomainError("mc_moment needs at least 100 samples");
  MCOptions opt{samples, seed, jobs, true};
  return mc_run(g, n, {s}, opt).moments.front()[(i - 1) * n + (j - 1)];
}

}  // namespace angulon
