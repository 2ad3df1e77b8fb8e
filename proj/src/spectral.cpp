#include "nlscn/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>

#include "nlscn/errors.hpp"

namespace nlscn {

namespace {

// FFTW planning is not thread-safe
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

bool is_power_of_two(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::vector<double> wavenumbers(int N, double length) {
  std::vector<double> k(N);
  const double base = 2.0 * std::numbers::pi / length;
  for (int m = 0; m < N; ++m) k[m] = base * (m < N / 2 ? m : m - N);
  return k;
}

}  // namespace

SpectralGrid::SpectralGrid(int n, Bounds b) : N(n), bounds(b) {
  if (!is_power_of_two(n) || n < 2) {
    throw ConfigError("spectral grid size must be a power of two");
  }
  if (!(b.bx > b.ax) || !(b.by > b.ay)) {
    throw ConfigError("spectral grid: box must have positive extent");
  }
  values.assign(static_cast<std::size_t>(n) * n, cplx{});
}

std::vector<double> SpectralGrid::kx() const { return wavenumbers(N, bounds.width()); }
std::vector<double> SpectralGrid::ky() const { return wavenumbers(N, bounds.height()); }

struct Fft2d::Impl {
  fftw_complex* buf = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan bwd = nullptr;
};

Fft2d::Fft2d(int N) : N_(N), impl_(std::make_unique<Impl>()) {
  if (!is_power_of_two(N)) throw ConfigError("FFT size must be a power of two");
  const std::size_t n = static_cast<std::size_t>(N) * N;
  std::lock_guard<std::mutex> lock(plan_mutex());
  impl_->buf = fftw_alloc_complex(n);
  impl_->fwd = fftw_plan_dft_2d(N, N, impl_->buf, impl_->buf, FFTW_FORWARD, FFTW_ESTIMATE);
  impl_->bwd = fftw_plan_dft_2d(N, N, impl_->buf, impl_->buf, FFTW_BACKWARD, FFTW_ESTIMATE);
}

Fft2d::~Fft2d() {
  if (impl_) {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(impl_->fwd);
    fftw_destroy_plan(impl_->bwd);
    fftw_free(impl_->buf);
  }
}

void Fft2d::forward(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t n = static_cast<std::size_t>(N_) * N_;
  if (in.size() != n || out.size() != n) throw DimensionError("FFT: size mismatch");
  std::memcpy(impl_->buf, in.data(), n * sizeof(cplx));
  fftw_execute(impl_->fwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, n * sizeof(cplx));
}

void Fft2d::inverse(std::span<const cplx> in, std::span<cplx> out) const {
  const std::size_t n = static_cast<std::size_t>(N_) * N_;
  if (in.size() != n || out.size() != n) throw DimensionError("FFT: size mismatch");
  std::memcpy(impl_->buf, in.data(), n * sizeof(cplx));
  fftw_execute(impl_->bwd);
  std::memcpy(static_cast<void*>(out.data()), impl_->buf, n * sizeof(cplx));
  const double s = 1.0 / static_cast<double>(n);
  for (cplx& v : out) v *= s;
}

CVector fourier_forward(const SpectralGrid& grid) {
  Fft2d fft(grid.N);
  CVector modes(grid.values.size());
  fft.forward(grid.values, modes);
  return modes;
}

SpectralGrid fourier_inverse(std::span<const cplx> modes, int N, Bounds bounds) {
  SpectralGrid g(N, bounds);
  Fft2d fft(N);
  fft.inverse(modes, g.values);
  return g;
}

std::vector<double> sample_potential(const SpectralGrid& grid,
                                     const std::function<double(double, double)>& V) {
  std::vector<double> out(grid.values.size());
  for (int j = 0; j < grid.N; ++j) {
    for (int i = 0; i < grid.N; ++i) {
      const Point p = grid.point(i, j);
      out[i + j * grid.N] = V(p.x, p.y);
    }
  }
  return out;
}

double spectral_mass(const SpectralGrid& grid) {
  double s = 0.0;
  for (const cplx& v : grid.values) s += std::norm(v);
  return s * grid.dx() * grid.dy();
}

double spectral_energy(const SpectralGrid& grid, std::span<const double> V,
                       const NonlinearityModel& model, const Fft2d& fft) {
  const int N = grid.N;
  CVector modes(grid.values.size());
  fft.forward(grid.values, modes);
  const auto kx = grid.kx();
  const auto ky = grid.ky();
  double kinetic = 0.0;
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      kinetic += (kx[i] * kx[i] + ky[j] * ky[j]) * std::norm(modes[i + j * N]);
  kinetic /= static_cast<double>(N) * N;
  double local = 0.0;
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    const double rho = std::norm(grid.values[k]);
    local += V[k] * rho + model.Gamma(rho);
  }
  return 0.5 * (kinetic + local) * grid.dx() * grid.dy();
}

namespace {

void phase_half_step(SpectralGrid& grid, std::span<const double> V, const NonlinearityModel& model,
                     double half_tau) {
  for (std::size_t k = 0; k < grid.values.size(); ++k) {
    cplx& u = grid.values[k];
    const double w = V[k] + model.gamma(std::norm(u));
    u *= std::polar(1.0, -w * half_tau);
  }
}

}  // namespace

void sp2_step(SpectralGrid& grid, std::span<const double> V, const NonlinearityModel& model,
              double tau, const Fft2d& fft) {
  const int N = grid.N;
  if (V.size() != grid.values.size() || fft.size() != N) {
    throw DimensionError("sp2_step: potential or FFT does not match the grid");
  }
  phase_half_step(grid, V, model, 0.5 * tau);
  CVector modes(grid.values.size());
  fft.forward(grid.values, modes);
  const auto kx = grid.kx();
  const auto ky = grid.ky();
  for (int j = 0; j < N; ++j)
    for (int i = 0; i < N; ++i)
      modes[i + j * N] *= std::polar(1.0, -(kx[i] * kx[i] + ky[j] * ky[j]) * tau);
  fft.inverse(modes, grid.values);
  phase_half_step(grid, V, model, 0.5 * tau);
}

SP2Result evolve_sp2(const SpectralGrid& grid0, long n_steps, std::span<const double> V,
                     const NonlinearityModel& model, double tau,
                     const std::function<void(const ObservableRecord&, const SpectralGrid&)>& observer) {
  if (n_steps < 0) throw ConfigError("evolve_sp2: negative step count");
  if (!(tau != 0.0)) throw ConfigError("evolve_sp2: tau must be nonzero");
  const Fft2d fft(grid0.N);
  SP2Result out;
  out.final_grid = grid0;
  ObservableRecord r0;
  r0.mass = spectral_mass(grid0);
  r0.energy = spectral_energy(grid0, V, model, fft);
  out.log.push_back(r0);
  for (long s = 1; s <= n_steps; ++s) {
    sp2_step(out.final_grid, V, model, tau, fft);
    ObservableRecord r;
    r.step = s;
    r.t = s * tau;
    r.mass = spectral_mass(out.final_grid);
    r.energy = spectral_energy(out.final_grid, V, model, fft);
    r.iters = 1;
    out.log.push_back(r);
    if (observer) observer(r, out.final_grid);
  }
  return out;
}

SpectralGrid resample(const SpectralGrid& grid, int M) {
  const int N = grid.N;
  SpectralGrid out(M, grid.bounds);
  if (M == N) {
    out.values = grid.values;
    return out;
  }
  if (M < N) {
    if (N % M != 0) throw ConfigError("resample: target size must divide the grid size");
    const int r = N / M;
    for (int j = 0; j < M; ++j)
      for (int i = 0; i < M; ++i) out.values[i + j * M] = grid.values[i * r + j * r * N];
    return out;
  }
  if (M % N != 0) throw ConfigError("resample: target size must be a multiple of the grid size");
  const CVector modes = fourier_forward(grid);
  // per-axis scatter of source mode m into target modes; Nyquist split evenly
  auto targets = [&](int m) {
    std::vector<std::pair<int, double>> t;
    if (m < N / 2) {
      t.emplace_back(m, 1.0);
    } else if (m > N / 2) {
      t.emplace_back(M - (N - m), 1.0);
    } else {
      t.emplace_back(N / 2, 0.5);
      t.emplace_back(M - N / 2, 0.5);
    }
    return t;
  };
  CVector padded(static_cast<std::size_t>(M) * M);
  const double scale = static_cast<double>(M) * M / (static_cast<double>(N) * N);
  for (int j = 0; j < N; ++j) {
    const auto ty = targets(j);
    for (int i = 0; i < N; ++i) {
      const auto tx = targets(i);
      for (const auto& [yj, wy] : ty)
        for (const auto& [xi, wx] : tx) padded[xi + yj * M] += scale * wx * wy * modes[i + j * N];
    }
  }
  Fft2d fft(M);
  fft.inverse(padded, out.values);
  return out;
}

CVector grid_to_dofs(const SpectralGrid& grid, const RectMesh& mesh) {
  if (mesh.bc() != BoundaryKind::periodic || mesh.nx() != grid.N || mesh.ny() != grid.N ||
      !(mesh.bounds() == grid.bounds)) {
    throw ConfigError("grid_to_dofs: mesh nodes must coincide with the spectral grid");
  }
  return grid.values;
}

SpectralGrid dofs_to_grid(const RectMesh& mesh, std::span<const cplx> U) {
  if (mesh.bc() != BoundaryKind::periodic || mesh.nx() != mesh.ny()) {
    throw ConfigError("dofs_to_grid: need a square periodic mesh");
  }
  if (static_cast<int>(U.size()) != mesh.num_dofs()) {
    throw DimensionError("dofs_to_grid: vector does not match the mesh");
  }
  SpectralGrid g(mesh.nx(), mesh.bounds());
  g.values.assign(U.begin(), U.end());
  return g;
}

}  // namespace nlscn
