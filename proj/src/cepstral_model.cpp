#include "cepfield/cepstral_model.hpp"

#include <complex>
#include <memory>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <string>
#include <unordered_map>

#include <fftw3.h>

namespace cepfield {
namespace {

using cd = std::complex<double>;
using CMat = Eigen::MatrixXcd;

constexpr int kDirectMeshLimit = 64;

// FFTW planning is not thread-safe; execution is.
std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// Real n x n periodic grid with its half-complex transform and cached
// plans, one per thread and size.
class RealFft2d {
 public:
  explicit RealFft2d(int n)
      : n_(n),
        half_cols_(n / 2 + 1),
        real_(fftw_alloc_real(static_cast<std::size_t>(n) * n)),
        half_(fftw_alloc_complex(static_cast<std::size_t>(n) * half_cols_)) {
    if (!real_ || !half_) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    to_real_ = fftw_plan_dft_c2r_2d(n, n, half_, real_, FFTW_ESTIMATE);
    to_half_ = fftw_plan_dft_r2c_2d(n, n, real_, half_, FFTW_ESTIMATE);
  }
  ~RealFft2d() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(to_real_);
    fftw_destroy_plan(to_half_);
    fftw_free(real_);
    fftw_free(half_);
  }
  RealFft2d(const RealFft2d&) = delete;
  RealFft2d& operator=(const RealFft2d&) = delete;

  static RealFft2d& for_size(int n) {
    thread_local std::unordered_map<int, std::unique_ptr<RealFft2d>> cache;
    auto& slot = cache[n];
    if (!slot) slot = std::make_unique<RealFft2d>(n);
    return *slot;
  }

  int wrap(int a) const { return ((a % n_) + n_) % n_; }
  double& real(int a, int b) { return real_[static_cast<std::size_t>(wrap(a)) * n_ + wrap(b)]; }
  double* real_data() { return real_; }
  std::size_t size() const { return static_cast<std::size_t>(n_) * n_; }
  // Half-complex entry (a, b), 0 <= b <= n / 2.
  cd& half(int a, int b) {
    return reinterpret_cast<cd*>(half_)[static_cast<std::size_t>(wrap(a)) * half_cols_ + b];
  }
  void clear_half() {
    std::fill_n(reinterpret_cast<double*>(half_), 2 * static_cast<std::size_t>(n_) * half_cols_, 0.0);
  }
  void half_to_real() { fftw_execute(to_real_); }
  void real_to_half() { fftw_execute(to_half_); }

 private:
  int n_;
  int half_cols_;
  double* real_;
  fftw_complex* half_;
  fftw_plan to_real_;
  fftw_plan to_half_;
};

// E_{jk} = exp{pi i (p+1-j)(M+1-k)/M}, 1-based; G has the same form with H.
CMat phase_matrix(int half_rows, int M) {
  const int rows = 2 * half_rows + 1;
  const int cols = 2 * M + 1;
  CMat E(rows, cols);
  for (int j = 1; j <= rows; ++j)
    for (int k = 1; k <= cols; ++k) {
      const double angle = std::numbers::pi * (half_rows + 1 - j) * (M + 1 - k) / M;
      E(j - 1, k - 1) = std::polar(1.0, angle);
    }
  return E;
}

// Entry (r, s) (0-based) is log F(pi (M - s) / M, pi (M - r) / M).
CMat log_spectrum_direct(const CepstralGrid& grid, int M) {
  const CMat E = phase_matrix(grid.order(), M);
  const CMat theta = grid.as_matrix().cast<cd>();
  return E.adjoint() * theta * E;
}

Eigen::MatrixXd mesh_from_direct(const CMat& log_f, int M) {
  const int w = 2 * M + 1;
  double scale = 1.0;
  for (int r = 0; r < w; ++r)
    for (int s = 0; s < w; ++s) scale = std::max(scale, std::abs(log_f(r, s).real()));
  Eigen::MatrixXd values(w, w);
  for (int r = 0; r < w; ++r)
    for (int s = 0; s < w; ++s) {
      if (std::abs(log_f(r, s).imag()) > 1e-10 * scale)
        throw std::logic_error("log spectrum has a non-negligible imaginary part");
      values(2 * M - s, 2 * M - r) = std::exp(log_f(r, s).real());
    }
  return values;
}

void check_mesh(const CepstralGrid& grid, int M) {
  if (M < 1 || M < grid.order())
    throw std::invalid_argument("mesh order " + std::to_string(M) +
                                " cannot resolve cepstral order " +
                                std::to_string(grid.order()));
}

// F on the periodic 2M x 2M grid (2 pi a / 2M, 2 pi b / 2M), left in the
// workspace's real array. Theta is real and mirror symmetric, so its
// transform is real and the c2r transform evaluates log F directly.
RealFft2d& spectrum_fft(const CepstralGrid& grid, int M) {
  RealFft2d& w = RealFft2d::for_size(2 * M);
  w.clear_half();
  const int p = grid.order();
  for (int a = -p; a <= p; ++a)
    for (int b = 0; b <= p; ++b) w.half(a, b) = grid(a, b);
  w.half_to_real();
  double* f = w.real_data();
  for (std::size_t i = 0; i < w.size(); ++i) f[i] = std::exp(f[i]);
  return w;
}

void symmetrize(AcfTable& acf) {
  const Eigen::MatrixXd flipped = acf.gamma.reverse();
  acf.gamma = 0.5 * (acf.gamma + flipped);
}

}  // namespace

SpectralMesh spectrum_on_mesh(const CepstralGrid& grid, int M, MeshMethod method) {
  check_mesh(grid, M);
  if (method == MeshMethod::automatic)
    method = M <= kDirectMeshLimit ? MeshMethod::direct : MeshMethod::fft;
  SpectralMesh mesh{M, {}};
  if (method == MeshMethod::direct) {
    mesh.values = mesh_from_direct(log_spectrum_direct(grid, M), M);
    return mesh;
  }
  RealFft2d& w = spectrum_fft(grid, M);
  mesh.values.resize(2 * M + 1, 2 * M + 1);
  for (int u = -M; u <= M; ++u)
    for (int v = -M; v <= M; ++v) mesh.values(u + M, v + M) = w.real(u, v);
  return mesh;
}

AcfTable acf_mesh(const CepstralGrid& grid, int M, int H, QuadratureRule rule,
                  MeshMethod method) {
  check_mesh(grid, M);
  if (H < 0) throw std::invalid_argument("maximum lag must be >= 0");
  if (H > M)
    throw std::invalid_argument("maximum lag " + std::to_string(H) +
                                " exceeds mesh order " + std::to_string(M));
  if (method == MeshMethod::automatic)
    method = (M <= kDirectMeshLimit || rule == QuadratureRule::endpoint_inclusive)
                 ? MeshMethod::direct
                 : MeshMethod::fft;
  if (method == MeshMethod::fft && rule == QuadratureRule::endpoint_inclusive)
    throw std::invalid_argument("endpoint-inclusive quadrature needs the direct mesh");

  AcfTable acf{H, Eigen::MatrixXd::Zero(2 * H + 1, 2 * H + 1)};
  if (method == MeshMethod::fft) {
    const int n = 2 * M;
    RealFft2d& w = spectrum_fft(grid, M);
    w.real_to_half();
    const double norm = 1.0 / (static_cast<double>(n) * n);
    for (int h = -H; h <= H; ++h)
      for (int k = 0; k <= H; ++k) acf(h, k) = acf(-h, -k) = w.half(h, k).real() * norm;
    symmetrize(acf);
    return acf;
  }

  const int w = 2 * M + 1;
  CMat weighted = log_spectrum_direct(grid, M).array().exp().matrix();
  double norm;
  if (rule == QuadratureRule::trapezoid) {
    weighted.row(0) *= 0.5;
    weighted.row(w - 1) *= 0.5;
    weighted.col(0) *= 0.5;
    weighted.col(w - 1) *= 0.5;
    norm = 1.0 / (4.0 * M * M);
  } else {
    norm = 1.0 / (static_cast<double>(w) * w);
  }
  const CMat G = phase_matrix(H, M);
  const CMat gamma_display = G * weighted * G.adjoint() * norm;
  // [Gamma]_{l,m} = gamma_{m-H-1, H+1-l}
  for (int h = -H; h <= H; ++h)
    for (int k = -H; k <= H; ++k) acf(h, k) = gamma_display(H - k, h + H).real();
  symmetrize(acf);
  return acf;
}

MaCoefficients cepstral_to_ma(const CepstralGrid& grid, int K, double tail_tolerance) {
  if (K < 1) throw std::invalid_argument("MA truncation must be >= 1");
  const int p = grid.order();
  MaCoefficients ma;
  ma.K = K;
  ma.psi = Eigen::MatrixXd::Zero(K + 1, K + 1);
  ma.phi = Eigen::MatrixXd::Zero(K + 1, K + 1);
  ma.xi = Eigen::VectorXd::Zero(K + 1);
  ma.omega = Eigen::VectorXd::Zero(K + 1);
  ma.psi(0, 0) = ma.phi(0, 0) = ma.xi(0) = ma.omega(0) = 1.0;

  // psi_{j,k} = (1/j) sum_m m sum_n psi_{j-m,k-n} Theta_{m,n}; psi_{j,k}
  // depends only on entries with smaller k, so sweep k outermost.
  for (int k = 1; k <= K; ++k)
    for (int j = 1; j <= K; ++j) {
      double s_psi = 0.0;
      double s_phi = 0.0;
      for (int m = 1; m <= std::min(p, j); ++m)
        for (int n = 1; n <= std::min(p, k); ++n) {
          s_psi += m * ma.psi(j - m, k - n) * grid(m, n);
          s_phi += m * ma.phi(j - m, k - n) * grid(-m, n);
        }
      ma.psi(j, k) = s_psi / j;
      ma.phi(j, k) = s_phi / j;
    }
  for (int j = 1; j <= K; ++j) {
    double s_xi = 0.0;
    double s_omega = 0.0;
    for (int m = 1; m <= std::min(p, j); ++m) {
      s_xi += m * grid(m, 0) * ma.xi(j - m);
      s_omega += m * grid(0, m) * ma.omega(j - m);
    }
    ma.xi(j) = s_xi / j;
    ma.omega(j) = s_omega / j;
  }

  double tail = std::max(std::abs(ma.xi(K)), std::abs(ma.omega(K)));
  for (int j = 0; j <= K; ++j) {
    tail = std::max(tail, std::abs(ma.psi(j, K - j)));
    tail = std::max(tail, std::abs(ma.phi(j, K - j)));
  }
  ma.tail = tail;
  ma.tail_ok = tail <= tail_tolerance;
  return ma;
}

namespace {

// gamma_{r,s} = sum_{m,n >= 0} c_{r+m,s+n} c_{m,n} over the stored support.
Eigen::MatrixXd ma_acf_2d(const Eigen::MatrixXd& c) {
  const int K = static_cast<int>(c.rows()) - 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Zero(2 * K + 1, 2 * K + 1);
  for (int r = -K; r <= K; ++r)
    for (int s = -K; s <= K; ++s) {
      double acc = 0.0;
      for (int m = std::max(0, -r); m <= std::min(K, K - r); ++m)
        for (int n = std::max(0, -s); n <= std::min(K, K - s); ++n)
          acc += c(r + m, s + n) * c(m, n);
      g(r + K, s + K) = acc;
    }
  return g;
}

Eigen::VectorXd ma_acf_1d(const Eigen::VectorXd& c) {
  const int K = static_cast<int>(c.size()) - 1;
  Eigen::VectorXd g = Eigen::VectorXd::Zero(2 * K + 1);
  for (int h = 0; h <= K; ++h) {
    double acc = 0.0;
    for (int m = 0; m + h <= K; ++m) acc += c(m) * c(m + h);
    g(K + h) = g(K - h) = acc;
  }
  return g;
}

}  // namespace

MaAcfs ma_acf(const MaCoefficients& ma) {
  return {ma.K, ma_acf_2d(ma.psi), ma_acf_2d(ma.phi), ma_acf_1d(ma.xi),
          ma_acf_1d(ma.omega)};
}

AcfTable acf_exact(const CepstralGrid& grid, int H, int K, double tail_tolerance) {
  if (H < 0) throw std::invalid_argument("maximum lag must be >= 0");
  const MaCoefficients ma = cepstral_to_ma(grid, K, tail_tolerance);
  const MaAcfs acfs = ma_acf(ma);

  // C_{u,v} = sum_{m,n} gamma_{u-m,v-n}(Psi) gamma_m(Xi) gamma_n(Omega),
  // supported on |u|, |v| <= 2K.
  const int K2 = 2 * K;
  Eigen::MatrixXd rows = Eigen::MatrixXd::Zero(2 * K2 + 1, 2 * K + 1);
  for (int u = -K2; u <= K2; ++u)
    for (int s = -K; s <= K; ++s) {
      double acc = 0.0;
      for (int m = std::max(-K, u - K); m <= std::min(K, u + K); ++m)
        acc += acfs.psi(u - m + K, s + K) * acfs.xi(m + K);
      rows(u + K2, s + K) = acc;
    }
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(2 * K2 + 1, 2 * K2 + 1);
  for (int u = -K2; u <= K2; ++u)
    for (int v = -K2; v <= K2; ++v) {
      double acc = 0.0;
      for (int n = std::max(-K, v - K); n <= std::min(K, v + K); ++n)
        acc += rows(u + K2, v - n + K) * acfs.omega(n + K);
      C(u + K2, v + K2) = acc;
    }

  // gamma_{j,k} = e^{Theta_00} sum_{a,b} gamma_{a,b}(Phi) C_{j+a, k-b}
  AcfTable acf{H, Eigen::MatrixXd::Zero(2 * H + 1, 2 * H + 1)};
  acf.truncation_warning = !ma.tail_ok;
  const double scale = std::exp(grid(0, 0));
  for (int j = -H; j <= H; ++j)
    for (int k = -H; k <= H; ++k) {
      double acc = 0.0;
      for (int a = -K; a <= K; ++a) {
        const int u = j + a;
        if (u < -K2 || u > K2) continue;
        for (int b = -K; b <= K; ++b) {
          const int v = k - b;
          if (v < -K2 || v > K2) continue;
          acc += acfs.phi(a + K, b + K) * C(u + K2, v + K2);
        }
      }
      acf(j, k) = scale * acc;
    }
  symmetrize(acf);
  return acf;
}

}  // namespace cepfield
