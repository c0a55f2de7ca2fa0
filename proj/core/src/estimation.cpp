#include "mcv/estimation.hpp"

#include <cctype>
#include <cmath>

#include <fmt/core.h>

namespace mcv {

std::string_view to_string(Variant v) noexcept {
  switch (v) {
    case Variant::rr: return "RR";
    case Variant::vv: return "VV";
    case Variant::vn: return "VN";
    case Variant::az: return "AZ";
  }
  return "?";
}

Variant parse_variant(std::string_view text) {
  std::string lower;
  for (char ch : text) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
  if (lower == "rr") return Variant::rr;
  if (lower == "vv") return Variant::vv;
  if (lower == "vn") return Variant::vn;
  if (lower == "az") return Variant::az;
  throw InputError(fmt::format("unknown MCV variant '{}' (expected rr, vv, vn or az)", text));
}

MomentSet sample_moments(const Sample& x) {
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2) throw DegenerateError(Degeneracy::too_few_observations, "sample_moments needs n >= 2");
  if (d < 1) throw InputError("sample_moments: sample has no columns");
  if (!x.allFinite()) throw InputError("sample_moments: non-finite observation");

  const double inv_n = 1.0 / static_cast<double>(n);
  MomentSet m;
  m.n = static_cast<std::size_t>(n);
  m.mean = x.colwise().mean().transpose();
  const Matrix centered = x.rowwise() - m.mean.transpose();
  m.cov = (centered.transpose() * centered) * inv_n;
  m.cov = 0.5 * (m.cov + m.cov.transpose());

  // Column a*d + r of z holds x_a x_r; columns (a, r) and (r, a) are bitwise
  // equal, so the explicit loops below keep the index symmetries exact.
  const Eigen::Index dd = d * d;
  Matrix z(n, dd);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r) z.col(a * d + r) = x.col(a).cwiseProduct(x.col(r));

  Vector zbar(dd);
  for (Eigen::Index p = 0; p < dd; ++p) zbar(p) = z.col(p).sum() * inv_n;
  m.raw2 = unvec(zbar);

  m.psi3.resize(dd, d);
  for (Eigen::Index p = 0; p < dd; ++p)
    for (Eigen::Index s = 0; s < d; ++s) {
      double acc = 0;
      for (Eigen::Index j = 0; j < n; ++j) acc += z(j, p) * x(j, s);
      m.psi3(p, s) = acc * inv_n - zbar(p) * m.mean(s);
    }

  m.psi4.resize(dd, dd);
  for (Eigen::Index p = 0; p < dd; ++p)
    for (Eigen::Index q = p; q < dd; ++q) {
      double acc = 0;
      for (Eigen::Index j = 0; j < n; ++j) acc += z(j, p) * z(j, q);
      m.psi4(p, q) = acc * inv_n - zbar(p) * zbar(q);
      m.psi4(q, p) = m.psi4(p, q);
    }
  return m;
}

Matrix dtilde(const Vector& x) {
  const Eigen::Index d = x.size();
  Matrix out = Matrix::Zero(d * d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r)
      for (Eigen::Index s = 0; s < d; ++s) {
        double v = 0;
        if (s == a && a != r) v -= x(r);
        if (s == r && r == a) v -= 2 * x(s);
        if (r == s && s != a) v -= x(a);
        out(a * d + r, s) = v;
      }
  return out;
}

namespace {

constexpr double kZeroMeanRatio = (16 * kEps) * (16 * kEps);

struct Evaluation {
  double c = 0;
  RowVector gradient;
  std::optional<Degeneracy> failure;
};

struct SymmetricFactor {
  Vector lambda;
  Matrix vectors;
  Matrix inverse() const { return vectors * lambda.cwiseInverse().asDiagonal() * vectors.transpose(); }
};

// Eigendecomposition of a covariance matrix required to be regular. One
// decomposition serves the numeric-rank check, the log-determinant and the
// inverse.
std::optional<SymmetricFactor> regular_factor(const Matrix& cov) {
  const Eigen::Index d = cov.rows();
  Eigen::SelfAdjointEigenSolver<Matrix> eig(0.5 * (cov + cov.transpose()));
  if (eig.info() != Eigen::Success) return std::nullopt;
  const Vector& lambda = eig.eigenvalues();  // ascending
  const double largest = lambda.cwiseAbs().maxCoeff();
  if (!(largest > 0) || lambda(0) <= kEps * largest * static_cast<double>(d)) return std::nullopt;
  return SymmetricFactor{lambda, eig.eigenvectors()};
}

Evaluation evaluate(Variant variant, const Vector& mu, const Matrix& cov, bool with_gradient) {
  Evaluation out;
  const Eigen::Index d = mu.size();
  const double q = mu.squaredNorm();
  const double trace = cov.trace();
  if (!(q > 0) || q <= kZeroMeanRatio * std::max(0.0, trace)) {
    out.failure = Degeneracy::zero_mean;
    return out;
  }
  const double dd = static_cast<double>(d);
  const double trace_tol = 16 * dd * kEps * q;

  RowVector grad;
  if (with_gradient) grad.resize(d + d * d);
  auto set_moment_block = [&](const Matrix& block, double factor) {
    for (Eigen::Index a = 0; a < d; ++a)
      for (Eigen::Index r = 0; r < d; ++r) grad(d + a * d + r) = factor * block(a, r);
  };

  switch (variant) {
    case Variant::vv: {
      if (trace <= trace_tol) {
        out.failure = Degeneracy::zero_trace;
        return out;
      }
      out.c = std::sqrt(trace / q);
      if (with_gradient) {
        // d(c^2) = (-2 tr mu / q^2 - 2 mu / q, vec(I) / q); dc = d(c^2) / (2c)
        const double half_inv_c = 0.5 / out.c;
        grad.head(d) = (half_inv_c * (-2.0 * trace / (q * q) - 2.0 / q)) * mu.transpose();
        set_moment_block(Matrix::Identity(d, d), half_inv_c / q);
      }
      break;
    }
    case Variant::az: {
      if (trace <= trace_tol) {
        out.failure = Degeneracy::zero_trace;
        return out;
      }
      const Vector sigma_mu = cov * mu;
      const double form = mu.dot(sigma_mu);
      if (form <= 16 * dd * kEps * trace * q) {
        out.failure = Degeneracy::zero_quadratic_form;
        return out;
      }
      out.c = std::sqrt(form / (q * q));
      if (with_gradient) {
        const double half_inv_c = 0.5 / out.c;
        const double q2 = q * q;
        grad.head(d) = half_inv_c * ((-4.0 * form / (q2 * q) - 2.0 / q) * mu + (2.0 / q2) * sigma_mu).transpose();
        set_moment_block(mu * mu.transpose(), half_inv_c / q2);
      }
      break;
    }
    case Variant::rr: {
      const auto factor = regular_factor(cov);
      if (!factor) {
        out.failure = Degeneracy::singular_covariance;
        return out;
      }
      const double log_det = factor->lambda.array().log().sum();
      out.c = std::exp(0.5 * (log_det / dd - std::log(q)));
      if (with_gradient) {
        // u = det / q^d = c^(2d); du = u (-2d mu / q - 2 S^-1 mu, vec(S^-1));
        // dc = c / (2d u) du.
        const Matrix inv = factor->inverse();
        const double k = out.c / (2.0 * dd);
        grad.head(d) = (k * (-2.0 * dd / q * mu - 2.0 * inv * mu)).transpose();
        set_moment_block(inv, k);
      }
      break;
    }
    case Variant::vn: {
      const auto factor = regular_factor(cov);
      if (!factor) {
        out.failure = Degeneracy::singular_covariance;
        return out;
      }
      const Vector p = factor->inverse() * mu;
      const double w = mu.dot(p);
      if (!(w > 0)) {
        out.failure = Degeneracy::singular_covariance;
        return out;
      }
      out.c = 1.0 / std::sqrt(w);
      if (with_gradient) {
        // w = c^-2; dw = (2p + 2wp, -vec(p p')); dc = -(c^3 / 2) dw.
        const double k = -0.5 * out.c * out.c * out.c;
        grad.head(d) = (k * (2.0 + 2.0 * w) * p).transpose();
        set_moment_block(p * p.transpose(), -k);
      }
      break;
    }
  }
  if (with_gradient) out.gradient = std::move(grad);
  return out;
}

void throw_if_failed(const Evaluation& e) {
  if (e.failure) throw DegenerateError(*e.failure);
}

void check_shapes(const Vector& mean, const Matrix& cov) {
  if (mean.size() == 0 || cov.rows() != mean.size() || cov.cols() != mean.size())
    throw InputError(fmt::format("mean of length {} does not match a {}x{} covariance", mean.size(),
                                 cov.rows(), cov.cols()));
}

}  // namespace

double mcv(Variant variant, const Vector& mean, const Matrix& cov) {
  check_shapes(mean, cov);
  const Evaluation e = evaluate(variant, mean, cov, false);
  throw_if_failed(e);
  return e.c;
}

RowVector mcv_gradient(Variant variant, const Vector& mean, const Matrix& cov) {
  check_shapes(mean, cov);
  Evaluation e = evaluate(variant, mean, cov, true);
  throw_if_failed(e);
  return std::move(e.gradient);
}

RowVector a_matrix(Variant variant, const Vector& mean, const Matrix& cov) {
  check_shapes(mean, cov);
  throw_if_failed(evaluate(variant, mean, cov, false));

  const Eigen::Index d = mean.size();
  const double q = mean.squaredNorm();
  const Matrix dt = dtilde(mean);
  RowVector out(d + d * d);
  RowVector moment(d * d);

  switch (variant) {
    case Variant::rr: {
      const double det = cov.determinant();
      const Matrix inv = cov.inverse();
      moment = (det / std::pow(q, static_cast<double>(d))) * vec(inv).transpose();
      out.head(d) = -2.0 * static_cast<double>(d) * det * mean.transpose() / std::pow(q, d + 1.0) +
                    moment * dt;
      break;
    }
    case Variant::vv: {
      moment = vec(Matrix::Identity(d, d)).transpose() / q;
      out.head(d) = -2.0 * cov.trace() * mean.transpose() / (q * q) + moment * dt;
      break;
    }
    case Variant::vn: {
      const RowVector w = mean.transpose() * cov.inverse();
      moment = -kron(w, w);
      out.head(d) = 2.0 * w + moment * dt;
      break;
    }
    case Variant::az: {
      const RowVector mt = mean.transpose();
      const double form = mean.dot(cov * mean);
      moment = kron(mt, mt) / (q * q);
      out.head(d) = -4.0 * form * mt / (q * q * q) + 2.0 * mt * cov / (q * q) + moment * dt;
      break;
    }
  }
  out.tail(d * d) = moment;
  return out;
}

double s_factor(Variant variant, double c, Eigen::Index d) {
  if (!(c > 0)) throw InputError(fmt::format("s_factor: MCV value {} must be positive", c));
  switch (variant) {
    case Variant::rr: {
      const double dd = static_cast<double>(d);
      return std::pow(c, 2.0 - 4.0 * dd) / (dd * dd);
    }
    case Variant::vv:
    case Variant::az: return 1.0 / (c * c);
    case Variant::vn: return std::pow(c, 6.0);
  }
  return 0;
}

VarianceEstimate asymptotic_variance(Variant variant, const MomentSet& m) {
  const Eigen::Index d = m.mean.size();
  const double c = mcv(variant, m.mean, m.cov);
  const RowVector a = a_matrix(variant, m.mean, m.cov);

  Matrix joint(d + d * d, d + d * d);
  joint.topLeftCorner(d, d) = m.cov;
  joint.topRightCorner(d, d * d) = m.psi3.transpose();
  joint.bottomLeftCorner(d * d, d) = m.psi3;
  joint.bottomRightCorner(d * d, d * d) = m.psi4;

  double var_c = s_factor(variant, c, d) / 4.0 * a.dot(a * joint);
  if (var_c < -1e-10) throw DegenerateError(Degeneracy::negative_variance);
  var_c = std::max(var_c, 0.0);
  return {var_c, var_c / std::pow(c, 4.0)};
}

EstimateResult estimate(Variant variant, const Sample& x) {
  const MomentSet m = sample_moments(x);
  EstimateResult out;
  out.variant = variant;
  out.n = m.n;
  out.c = mcv(variant, m.mean, m.cov);
  out.b = 1.0 / out.c;
  const VarianceEstimate v = asymptotic_variance(variant, m);
  out.var_c = v.var_c;
  out.var_b = v.var_b;
  const auto d = static_cast<std::size_t>(x.cols());
  if (m.n < d + 2)
    out.warnings.push_back(fmt::format(
        "n = {} < d + 2 = {}: the covariance estimate is singular for continuous data", m.n, d + 2));
  return out;
}

OneSampleCi one_sample_ci(Variant variant, const Sample& x, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw InputError(fmt::format("one_sample_ci: alpha {} outside (0, 1)", alpha));
  const EstimateResult e = estimate(variant, x);
  const double z = normal_quantile(1.0 - alpha / 2.0);
  const double root_n = std::sqrt(static_cast<double>(e.n));
  const double half_c = z * std::sqrt(e.var_c) / root_n;
  const double half_b = z * std::sqrt(e.var_b) / root_n;
  return {{e.c - half_c, e.c + half_c}, {e.b - half_b, e.b + half_b}};
}

Fit fit_mcv(Variant variant, const Eigen::Ref<const Matrix>& x) {
  Fit out;
  const Eigen::Index n = x.rows();
  const Eigen::Index d = x.cols();
  if (n < 2 || d < 1) {
    out.failure = Degeneracy::too_few_observations;
    return out;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  const Vector mu = x.colwise().mean().transpose();
  const Matrix y = x.rowwise() - mu.transpose();
  Matrix cov = (y.transpose() * y) * inv_n;
  cov = 0.5 * (cov + cov.transpose());

  const Evaluation e = evaluate(variant, mu, cov, true);
  if (e.failure) {
    out.failure = e.failure;
    return out;
  }
  out.c = e.c;

  // Influence value g1'x + x'Gx, rewritten around the sample mean:
  // const + (g1 + (G + G')mu)'y + y'Gy.
  Matrix g(d, d);
  for (Eigen::Index a = 0; a < d; ++a)
    for (Eigen::Index r = 0; r < d; ++r) g(a, r) = e.gradient(d + a * d + r);
  const Vector linear = e.gradient.head(d).transpose() + (g + g.transpose()) * mu;
  const Vector influence = y * linear + (y * g).cwiseProduct(y).rowwise().sum();
  const double centre = influence.mean();
  out.var_c = (influence.array() - centre).square().sum() * inv_n;
  return out;
}

}  // namespace mcv
