#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

#include "nlscn/diagnostics.hpp"
#include "nlscn/mesh.hpp"
#include "nlscn/nonlinearity.hpp"
#include "nlscn/types.hpp"

namespace nlscn {

/// N x N samples of a periodic field on a box, x index fastest. Grid points
/// are x_i = ax + i (bx - ax) / N, so they coincide with the nodes of a
/// periodic RectMesh with nx = ny = N.
struct SpectralGrid {
  int N = 0;
  Bounds bounds;
  CVector values;

  SpectralGrid() = default;
  SpectralGrid(int N, Bounds bounds);

  double dx() const { return bounds.width() / N; }
  double dy() const { return bounds.height() / N; }
  Point point(int i, int j) const { return {bounds.ax + i * dx(), bounds.ay + j * dy()}; }
  /// Angular wavenumbers for mode index m in [0, N), Nyquist mode negative.
  std::vector<double> kx() const;
  std::vector<double> ky() const;
};

/// Unnormalized 2-D DFT (FFTW, estimate-mode plans so results are
/// reproducible run to run). The inverse divides by N^2.
class Fft2d {
 public:
  explicit Fft2d(int N);
  ~Fft2d();
  Fft2d(const Fft2d&) = delete;
  Fft2d& operator=(const Fft2d&) = delete;

  int size() const { return N_; }
  void forward(std::span<const cplx> in, std::span<cplx> out) const;
  void inverse(std::span<const cplx> in, std::span<cplx> out) const;

 private:
  struct Impl;
  int N_;
  std::unique_ptr<Impl> impl_;
};

CVector fourier_forward(const SpectralGrid& grid);
SpectralGrid fourier_inverse(std::span<const cplx> modes, int N, Bounds bounds);

/// Potential sampled at the grid points (no smoothing of jumps).
std::vector<double> sample_potential(const SpectralGrid& grid,
                                     const std::function<double(double, double)>& V);

double spectral_mass(const SpectralGrid& grid);
/// 1/2 [ sum_k |k|^2 |u_k|^2 + sum_j (V |u|^2 + Gamma(|u|^2)) ] dx dy (trapezoidal).
double spectral_energy(const SpectralGrid& grid, std::span<const double> V,
                       const NonlinearityModel& model, const Fft2d& fft);

/// One Strang step: half-step phase rotation exp(-i (V + gamma(|u|^2)) tau/2),
/// exact kinetic flow exp(-i |k|^2 tau) in Fourier space, half-step phase.
void sp2_step(SpectralGrid& grid, std::span<const double> V, const NonlinearityModel& model,
              double tau, const Fft2d& fft);

struct SP2Result {
  SpectralGrid final_grid;
  std::vector<ObservableRecord> log;
};

SP2Result evolve_sp2(const SpectralGrid& grid0, long n_steps, std::span<const double> V,
                     const NonlinearityModel& model, double tau,
                     const std::function<void(const ObservableRecord&, const SpectralGrid&)>&
                         observer = {});

/// Trigonometric interpolant of the grid sampled on an M x M grid of the
/// same box. M must be a multiple of N (zero padding) or divide N
/// (subsampling).
SpectralGrid resample(const SpectralGrid& grid, int M);

/// Grid values as dofs of the periodic mesh with nx = ny = grid.N.
CVector grid_to_dofs(const SpectralGrid& grid, const RectMesh& mesh);
SpectralGrid dofs_to_grid(const RectMesh& mesh, std::span<const cplx> U);

}  // namespace nlscn
