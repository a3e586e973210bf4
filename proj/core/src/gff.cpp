#include "slitflow/gff.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <json.hpp>
#include <ostream>

#include "slitflow/error.hpp"
#include "slitflow/format.hpp"
#include "slitflow/rng.hpp"

namespace slitflow::gff {

RectDomain RectDomain::make(double x0, double y0, double width, double height, int mesh,
                            std::size_t modes) {
  if (!(width > 0.0) || !(height > 0.0) || !(y0 >= 0.0) || mesh < 2 || modes == 0)
    throw Error(ErrorCode::ParameterRange, "invalid rectangle domain");
  if (modes > static_cast<std::size_t>(mesh) * static_cast<std::size_t>(mesh))
    throw Error(ErrorCode::ParameterRange, "mode cutoff exceeds mesh size");
  return RectDomain{x0, y0, width, height, mesh, modes};
}

bool RectDomain::contains(cplx z) const {
  return z.real() > x0 && z.real() < x0 + width && z.imag() > y0 && z.imag() < y0 + height;
}

cplx RectDomain::mesh_point(int i, int j) const {
  return {x0 + (i + 0.5) * width / mesh, y0 + (j + 0.5) * height / mesh};
}

// ---- eigenbasis --------------------------------------------------------------

EigenBasis::EigenBasis(const RectDomain& dom) : dom_(dom) {
  const double W = dom.width, H = dom.height;
  const double K = static_cast<double>(dom.modes);
  int mb = static_cast<int>(std::ceil(1.5 * std::sqrt(4.0 * K * W / (M_PI * H)))) + 4;
  int nb = static_cast<int>(std::ceil(1.5 * std::sqrt(4.0 * K * H / (M_PI * W)))) + 4;
  const double pi2 = M_PI * M_PI;
  for (;;) {
    modes_.clear();
    for (int m = 1; m <= mb; ++m)
      for (int n = 1; n <= nb; ++n) modes_.push_back({m, n, pi2 * (m * m / (W * W) + n * n / (H * H))});
    std::sort(modes_.begin(), modes_.end(), [](const Mode& a, const Mode& b) {
      if (a.lambda != b.lambda) return a.lambda < b.lambda;
      return a.m != b.m ? a.m < b.m : a.n < b.n;
    });
    if (modes_.size() < dom.modes) {
      mb *= 2;
      nb *= 2;
      continue;
    }
    modes_.resize(dom.modes);
    const double top = modes_.back().lambda;
    // Every omitted mode must lie above the cutoff.
    if (top < pi2 * ((mb + 1.0) * (mb + 1.0) / (W * W)) && top < pi2 * ((nb + 1.0) * (nb + 1.0) / (H * H))) break;
    mb *= 2;
    nb *= 2;
  }
  for (const Mode& md : modes_) {
    max_m_ = std::max(max_m_, md.m);
    max_n_ = std::max(max_n_, md.n);
  }
  norm_ = 2.0 / std::sqrt(W * H);
}

double EigenBasis::eval(std::size_t k, cplx z) const {
  if (!dom_.contains(z)) return 0.0;
  const Mode& md = modes_.at(k);
  return norm_ * std::sin(md.m * M_PI * (z.real() - dom_.x0) / dom_.width) *
         std::sin(md.n * M_PI * (z.imag() - dom_.y0) / dom_.height);
}

namespace {

void sine_rows(Eigen::MatrixXd& out, int rows, std::size_t col, double theta) {
  const double c2 = 2.0 * std::cos(theta);
  double prev = 0.0;
  double cur = std::sin(theta);
  for (int r = 0; r < rows; ++r) {
    out(r, static_cast<Eigen::Index>(col)) = cur;
    const double next = c2 * cur - prev;
    prev = cur;
    cur = next;
  }
}

}  // namespace

void EigenBasis::sine_tables(std::span<const cplx> points, Eigen::MatrixXd& sx, Eigen::MatrixXd& sy) const {
  const auto J = static_cast<Eigen::Index>(points.size());
  sx.setZero(max_m_, J);
  sy.setZero(max_n_, J);
  for (std::size_t j = 0; j < points.size(); ++j) {
    if (!dom_.contains(points[j])) continue;
    sine_rows(sx, max_m_, j, M_PI * (points[j].real() - dom_.x0) / dom_.width);
    sine_rows(sy, max_n_, j, M_PI * (points[j].imag() - dom_.y0) / dom_.height);
  }
}

Eigen::VectorXd EigenBasis::project(std::span<const cplx> points, std::span<const double> weighted_values) const {
  if (points.size() != weighted_values.size()) throw Error(ErrorCode::ParameterRange, "size mismatch");
  Eigen::MatrixXd sx, sy;
  sine_tables(points, sx, sy);
  const Eigen::Map<const Eigen::VectorXd> v(weighted_values.data(), static_cast<Eigen::Index>(weighted_values.size()));
  const Eigen::MatrixXd P = (sx * v.asDiagonal()) * sy.transpose();
  Eigen::VectorXd out(static_cast<Eigen::Index>(modes_.size()));
  for (std::size_t k = 0; k < modes_.size(); ++k)
    out(static_cast<Eigen::Index>(k)) = norm_ * P(modes_[k].m - 1, modes_[k].n - 1);
  return out;
}

Eigen::VectorXd EigenBasis::synthesize(const Eigen::VectorXd& coeffs, std::span<const cplx> points) const {
  if (static_cast<std::size_t>(coeffs.size()) != modes_.size())
    throw Error(ErrorCode::ParameterRange, "coefficient count does not match the basis");
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(max_m_, max_n_);
  for (std::size_t k = 0; k < modes_.size(); ++k)
    C(modes_[k].m - 1, modes_[k].n - 1) = coeffs(static_cast<Eigen::Index>(k));
  Eigen::MatrixXd sx, sy;
  sine_tables(points, sx, sy);
  const Eigen::MatrixXd A = C * sy;
  return norm_ * (sx.cwiseProduct(A)).colwise().sum().transpose();
}

double EigenBasis::pair_points(const Eigen::VectorXd& coeffs, std::span<const cplx> points,
                               std::span<const double> weighted_values) const {
  return coeffs.dot(project(points, weighted_values));
}

EigenBasis eigen_basis(const RectDomain& dom) { return EigenBasis(dom); }

// ---- test functions and meshes -------------------------------------------------

double TestFn::operator()(cplx z) const {
  const double s = std::norm(z - center) / (radius * radius);
  if (s >= 1.0) return 0.0;
  return amplitude * std::exp(1.0 - 1.0 / (1.0 - s));
}

QuadMesh support_mesh(std::span<const TestFn> fns, double h) {
  if (!(h > 0.0)) throw Error(ErrorCode::ParameterRange, "mesh spacing must be positive");
  QuadMesh mesh;
  mesh.h = h;
  if (fns.empty()) return mesh;
  double xl = INFINITY, xr = -INFINITY, yl = INFINITY, yr = -INFINITY;
  for (const TestFn& p : fns) {
    xl = std::min(xl, p.center.real() - p.radius);
    xr = std::max(xr, p.center.real() + p.radius);
    yl = std::min(yl, p.center.imag() - p.radius);
    yr = std::max(yr, p.center.imag() + p.radius);
  }
  const auto i0 = static_cast<long>(std::floor(xl / h)), i1 = static_cast<long>(std::ceil(xr / h));
  const auto j0 = static_cast<long>(std::floor(yl / h)), j1 = static_cast<long>(std::ceil(yr / h));
  for (long j = j0; j < j1; ++j) {
    for (long i = i0; i < i1; ++i) {
      const cplx z((i + 0.5) * h, (j + 0.5) * h);
      for (const TestFn& p : fns) {
        if (std::norm(z - p.center) < p.radius * p.radius) {
          mesh.points.push_back(z);
          break;
        }
      }
    }
  }
  return mesh;
}

QuadMesh support_mesh(const TestFn& p, double h) { return support_mesh(std::span<const TestFn>(&p, 1), h); }

QuadMesh bump_mesh(const TestFn& p, int per_diameter) {
  if (per_diameter < 2) throw Error(ErrorCode::ParameterRange, "bump mesh needs at least 2 cells");
  return support_mesh(p, 2.0 * p.radius / per_diameter);
}

std::vector<double> sample_on(const TestFn& p, const QuadMesh& mesh) {
  std::vector<double> v(mesh.points.size());
  for (std::size_t j = 0; j < v.size(); ++j) v[j] = p(mesh.points[j]);
  return v;
}

// ---- energies -------------------------------------------------------------------

GreenKernel half_plane_kernel() {
  return {[](cplx a, cplx b) { return conformal::green_half_plane_raw(a, b); },
          [](cplx z) { return std::log(2.0 * z.imag()); }};
}

GreenKernel rectangle_kernel(const RectDomain& dom) {
  auto F = std::make_shared<conformal::RectangleMap>(dom.x0, dom.y0, dom.width, dom.height);
  return {[F](cplx a, cplx b) { return conformal::green_half_plane_raw((*F)(a), (*F)(b)); },
          [F](cplx z) { return std::log(2.0 * (*F)(z).imag()) - std::log(std::abs(F->derivative(z))); }};
}

double cell_mean_log(double h) { return std::log(0.5 * h) + 0.5 * std::log(2.0) - 1.5 + M_PI / 4.0; }

double energy_product(const QuadMesh& mesh, std::span<const double> p, std::span<const double> q,
                      const GreenKernel& green) {
  const std::size_t J = mesh.points.size();
  if (p.size() != J || q.size() != J) throw Error(ErrorCode::ParameterRange, "size mismatch");
  const double w2 = mesh.weight() * mesh.weight();
  const double diag = cell_mean_log(mesh.h);
  double sum = 0.0;
  for (std::size_t i = 0; i < J; ++i) {
    if (p[i] == 0.0 && q[i] == 0.0) continue;
    sum += 2.0 * (green.robin(mesh.points[i]) - diag) * p[i] * q[i];
    for (std::size_t j = i + 1; j < J; ++j) {
      const double pq = p[i] * q[j] + p[j] * q[i];
      if (pq == 0.0) continue;
      sum += 2.0 * green.value(mesh.points[i], mesh.points[j]) * pq;
    }
  }
  return sum * w2;
}

double energy_from_images(const QuadMesh& mesh, std::span<const double> p, std::span<const cplx> w,
                          std::span<const cplx> log_wp) {
  const std::size_t J = mesh.points.size();
  if (p.size() != J || w.size() != J || log_wp.size() != J)
    throw Error(ErrorCode::ParameterRange, "size mismatch");
  const double diag = cell_mean_log(mesh.h);
  double sum = 0.0;
  for (std::size_t i = 0; i < J; ++i) {
    if (p[i] == 0.0) continue;
    const double robin = std::log(2.0 * w[i].imag()) - log_wp[i].real();
    sum += 2.0 * (robin - diag) * p[i] * p[i];
    double row = 0.0;
    for (std::size_t j = i + 1; j < J; ++j) row += conformal::green_half_plane_raw(w[i], w[j]) * p[j];
    sum += 4.0 * row * p[i];
  }
  return sum * mesh.weight() * mesh.weight();
}

double spectral_energy(const EigenBasis& basis, const QuadMesh& mesh, std::span<const double> p) {
  std::vector<double> wv(p.begin(), p.end());
  for (double& x : wv) x *= mesh.weight();
  const Eigen::VectorXd proj = basis.project(mesh.points, wv);
  double s = 0.0;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    const double c = proj(static_cast<Eigen::Index>(k));
    s += 4.0 * M_PI / basis.mode(k).lambda * c * c;
  }
  return s;
}

// ---- field sampling and pairings ---------------------------------------------------

GffSample sample_field(const EigenBasis& basis, std::uint64_t seed) {
  GffSample s;
  s.seed = seed;
  s.coeffs.resize(static_cast<Eigen::Index>(basis.size()));
  rng::Engine eng(seed);
  rng::Normal normal;
  for (std::size_t k = 0; k < basis.size(); ++k)
    s.coeffs(static_cast<Eigen::Index>(k)) = normal(eng) * std::sqrt(4.0 * M_PI / basis.mode(k).lambda);
  return s;
}

namespace {

void require_support(const EigenBasis& basis, const TestFn& p) {
  const RectDomain& d = basis.domain();
  const bool inside = p.center.real() - p.radius >= d.x0 && p.center.real() + p.radius <= d.x0 + d.width &&
                      p.center.imag() - p.radius >= d.y0 && p.center.imag() + p.radius <= d.y0 + d.height;
  if (!inside) throw Error(ErrorCode::SupportViolation, "test function support leaves the rectangle");
}

std::vector<double> weighted(const TestFn& p, const QuadMesh& mesh) {
  std::vector<double> v = sample_on(p, mesh);
  for (double& x : v) x *= mesh.weight();
  return v;
}

}  // namespace

double pair(const GffSample& field, const EigenBasis& basis, const TestFn& p, const QuadMesh& mesh) {
  require_support(basis, p);
  return basis.pair_points(field.coeffs, mesh.points, weighted(p, mesh));
}

double pair_function(const std::function<double(cplx)>& u, const TestFn& p, const QuadMesh& mesh) {
  double s = 0.0;
  for (const cplx& z : mesh.points) {
    const double pv = p(z);
    if (pv != 0.0) s += u(z) * pv;
  }
  return s * mesh.weight();
}

double pair_shifted(const GffSample& field, const EigenBasis& basis, const TestFn& p, const QuadMesh& mesh,
                    const std::function<double(cplx)>& u) {
  return pair(field, basis, p, mesh) + pair_function(u, p, mesh);
}

double pullback_pair_source(const GffSample& field, const EigenBasis& basis, const conformal::ConformalMap& w,
                            const TestFn& p, const QuadMesh& mesh) {
  std::vector<cplx> img(mesh.points.size());
  for (std::size_t j = 0; j < img.size(); ++j) img[j] = w(mesh.points[j]);
  return basis.pair_points(field.coeffs, img, weighted(p, mesh));
}

double pullback_pair(const GffSample& field, const EigenBasis& basis, const conformal::ConformalMap& w,
                     const TestFn& p, const QuadMesh& mesh, const PullbackOptions& opt) {
  const std::size_t J = mesh.points.size();
  if (J == 0) return 0.0;
  std::vector<cplx> img(J);
  std::vector<double> dabs(J);
  double xl = INFINITY, xr = -INFINITY, yl = INFINITY, yr = -INFINITY;
  for (std::size_t j = 0; j < J; ++j) {
    img[j] = w(mesh.points[j]);
    dabs[j] = std::abs(w.derivative(mesh.points[j]));
    xl = std::min(xl, img[j].real());
    xr = std::max(xr, img[j].real());
    yl = std::min(yl, img[j].imag());
    yr = std::max(yr, img[j].imag());
  }
  std::vector<double> sorted = dabs;
  std::nth_element(sorted.begin(), sorted.begin() + static_cast<long>(J / 2), sorted.end());
  const double ht = mesh.h * sorted[J / 2] / opt.refine;
  const double pad = 2.0 * mesh.h * *std::max_element(dabs.begin(), dabs.end());
  xl -= pad;
  xr += pad;
  yl -= pad;
  yr += pad;

  std::vector<cplx> targets;
  std::vector<double> vals;
  const auto nx = static_cast<long>(std::ceil((xr - xl) / ht));
  const auto ny = static_cast<long>(std::ceil((yr - yl) / ht));
  for (long b = 0; b < ny; ++b) {
    for (long a = 0; a < nx; ++a) {
      const cplx y(xl + (a + 0.5) * ht, yl + (b + 0.5) * ht);
      std::size_t best = 0;
      double bd = INFINITY;
      for (std::size_t j = 0; j < J; ++j) {
        const double d = std::norm(img[j] - y);
        if (d < bd) {
          bd = d;
          best = j;
        }
      }
      if (std::sqrt(bd) > 3.0 * mesh.h * dabs[best]) continue;
      cplx z = mesh.points[best];
      bool ok = false;
      for (int it = 0; it < opt.newton_max; ++it) {
        const cplx step = (w(z) - y) / w.derivative(z);
        z -= step;
        if (std::abs(step) < opt.newton_tol * std::max(1.0, std::abs(z))) {
          ok = true;
          break;
        }
      }
      if (!ok || !std::isfinite(z.real()) || !std::isfinite(z.imag()))
        throw Error(ErrorCode::InverseFailure, "Newton inversion did not converge");
      const double pv = p(z);
      if (pv == 0.0) continue;
      targets.push_back(y);
      vals.push_back(pv / std::norm(w.derivative(z)) * ht * ht);
    }
  }
  return basis.pair_points(field.coeffs, targets, vals);
}

// ---- coupling -----------------------------------------------------------------------

CoupledSample coupled_sample(const classify::FlowModel& model, const classify::HarmonicU& u,
                             const EigenBasis& basis, const TestFn& p, const QuadMesh& mesh,
                             const CouplingConfig& cfg, std::uint64_t flow_seed, std::uint64_t field_seed) {
  CoupledSample out;
  const std::vector<double> pw = weighted(p, mesh);
  std::vector<cplx> w(mesh.points.begin(), mesh.points.end());
  std::vector<cplx> lw(w.size(), cplx(0.0));
  if (cfg.T > 0.0) {
    const flow::DrivingPath d = flow::sample_driving(model.kappa, model.alpha, cfg.T, cfg.dt, flow_seed);
    flow::SlitFlowEnsemble ens(model, mesh.points, cfg.flow);
    ens.run(d, cfg.T);
    for (std::size_t j = 0; j < w.size(); ++j) {
      w[j] = ens.w(j);
      lw[j] = ens.log_wp(j);
      if (!ens.alive(j) || w[j].imag() < cfg.margin) out.collision = true;
    }
  }
  const GffSample field = sample_field(basis, field_seed);
  out.field_part = basis.pair_points(field.coeffs, w, pw);
  const double bg = model.cft.bg;
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j)
    if (pw[j] != 0.0) s += (u(w[j]) - 2.0 * bg * lw[j].imag()) * pw[j];
  out.u_part = s;
  out.value = out.field_part + out.u_part;
  return out;
}

// ---- serialization --------------------------------------------------------------------

void write_sample(std::ostream& os, const GffSample& s, const RectDomain& dom) {
  nlohmann::ordered_json h;
  h["domain"] = {{"x0", dom.x0}, {"y0", dom.y0}, {"width", dom.width}, {"height", dom.height}, {"mesh", dom.mesh}};
  h["K"] = s.coeffs.size();
  h["seed"] = s.seed;
  os << h.dump() << '\n';
  os.write(reinterpret_cast<const char*>(s.coeffs.data()),
           static_cast<std::streamsize>(sizeof(double) * static_cast<std::size_t>(s.coeffs.size())));
}

GffSample read_sample(std::istream& is, RectDomain* dom) {
  std::string line;
  if (!std::getline(is, line)) throw Error(ErrorCode::Config, "missing field header");
  nlohmann::json h;
  try {
    h = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad field header: ") + e.what());
  }
  GffSample s;
  s.seed = h.at("seed").get<std::uint64_t>();
  const auto K = h.at("K").get<std::size_t>();
  s.coeffs.resize(static_cast<Eigen::Index>(K));
  is.read(reinterpret_cast<char*>(s.coeffs.data()), static_cast<std::streamsize>(sizeof(double) * K));
  if (!is) throw Error(ErrorCode::Config, "truncated field coefficients");
  if (dom) {
    const auto& d = h.at("domain");
    dom->x0 = d.at("x0").get<double>();
    dom->y0 = d.at("y0").get<double>();
    dom->width = d.at("width").get<double>();
    dom->height = d.at("height").get<double>();
    dom->mesh = d.at("mesh").get<int>();
    dom->modes = K;
  }
  return s;
}

std::string stats_csv(std::span<const StatRow> rows) {
  std::string out = "stat,value,se,n\n";
  for (const StatRow& r : rows)
    out += r.stat + "," + format_double(r.value) + "," + format_double(r.se) + "," + std::to_string(r.n) + "\n";
  return out;
}

}  // namespace slitflow::gff
