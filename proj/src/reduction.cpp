#include <dirac/reduction.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dirac {
namespace {

// Section values only (no Jacobians): x parts and covector parts as n x k.
void frame_values(const SectionFrame& f, const Eigen::VectorXd& x, Eigen::MatrixXd& xb,
                  Eigen::MatrixXd& ab) {
  const int n = static_cast<int>(x.size());
  const int k = f.size();
  xb.resize(n, k);
  ab.resize(n, k);
  for (int i = 0; i < k; ++i) {
    xb.col(i) = f.sections[i].x_part.values(x);
    ab.col(i) = f.sections[i].a_part.values(x);
  }
}

Eigen::MatrixXd generator_values(const GroupActionData& act, const Eigen::VectorXd& x) {
  Eigen::MatrixXd g(x.size(), act.dim());
  for (int u = 0; u < act.dim(); ++u) g.col(u) = act.generators[u].values(x);
  return g;
}

SectionJet section_jet(const CourantSection& s, const Eigen::VectorXd& x) {
  Jet jx = eval_jet(s.x_part.core(), x);
  Jet ja = eval_jet(s.a_part.core(), x);
  return SectionJet{std::move(jx.value), std::move(ja.value), std::move(jx.jac),
                    std::move(ja.jac)};
}

// Constraint matrix of the pushforward fiber: pairs w = (c, beta) with
// a_part(c) - Dp^T beta = 0 describe the elements (X(c), Dp^T beta) of L.
Eigen::MatrixXd pushforward_constraints(const Eigen::MatrixXd& ab, const Eigen::MatrixXd& dp) {
  const int m = static_cast<int>(ab.rows());
  const int k = static_cast<int>(ab.cols());
  const int nn = static_cast<int>(dp.rows());
  Eigen::MatrixXd c(m, k + nn);
  c.leftCols(k) = ab;
  c.rightCols(nn) = -dp.transpose();
  return c;
}

// Maps null vectors w = (c, beta) of the constraint matrix to downstairs
// stacked elements (Dp X(c), beta).
Eigen::MatrixXd downstairs_image(const Eigen::MatrixXd& w, const Eigen::MatrixXd& xb,
                                 const Eigen::MatrixXd& dp) {
  const int k = static_cast<int>(xb.cols());
  const int nn = static_cast<int>(dp.rows());
  Eigen::MatrixXd img(2 * nn, w.cols());
  for (Eigen::Index j = 0; j < w.cols(); ++j) {
    img.col(j).head(nn) = dp * (xb * w.col(j).head(k));
    img.col(j).tail(nn) = w.col(j).tail(nn);
  }
  return img;
}

// Smooth section of the pushforward frame over N.  The fiber equations
// C(y) w = 0 (constraints at sigma(y)) are closed with the frozen gauge rows
// N0^T w = e_idx, where N0 spans the fiber solutions at the base point; near
// the base the combined system has full column rank and is consistent, so the
// least-squares solve depends smoothly on y.  Dp is formed by one internal
// derivative level, hence Cap 2.
class PushSectionCore final : public TypedCore<PushSectionCore, 2> {
 public:
  PushSectionCore(CorePtr sigma, CorePtr p, std::vector<CorePtr> xs, std::vector<CorePtr> as,
                  Eigen::MatrixXd n0, int idx)
      : sigma_(std::move(sigma)),
        p_(std::move(p)),
        xs_(std::move(xs)),
        as_(std::move(as)),
        n0_(std::move(n0)),
        idx_(idx),
        m_(p_->in_dim()),
        nn_(p_->out_dim()),
        k_(static_cast<int>(xs_.size())) {}

  int in_dim() const override { return nn_; }
  int out_dim() const override { return 2 * nn_; }
  int depth() const override {
    int d = std::min(sigma_->depth(), p_->depth() - 1);
    for (const auto& c : xs_) d = std::min(d, c->depth());
    for (const auto& c : as_) d = std::min(d, c->depth());
    return std::min(2, d);
  }

  template <class T>
  void evalT(std::span<const T> y, std::span<T> out) const {
    std::vector<T> x(m_);
    eval_map<T>(*sigma_, y, x);

    TMat<T> jp(nn_, m_);
    {
      std::vector<Dual<T>> in(m_), pv(nn_);
      for (int dir = 0; dir < m_; ++dir) {
        for (int i = 0; i < m_; ++i) in[i] = Dual<T>(x[i], T(i == dir ? 1 : 0));
        eval_map<Dual<T>>(*p_, in, pv);
        for (int r = 0; r < nn_; ++r) jp(r, dir) = pv[r].d;
      }
    }

    TMat<T> xb(m_, k_), ab(m_, k_);
    {
      std::vector<T> buf(m_);
      for (int i = 0; i < k_; ++i) {
        eval_map<T>(*xs_[i], x, buf);
        for (int r = 0; r < m_; ++r) xb(r, i) = buf[r];
        eval_map<T>(*as_[i], x, buf);
        for (int r = 0; r < m_; ++r) ab(r, i) = buf[r];
      }
    }

    const int gauge = static_cast<int>(n0_.cols());
    const int cols = k_ + nn_;
    TMat<T> g(m_ + gauge, cols);
    for (int r = 0; r < m_; ++r) {
      for (int i = 0; i < k_; ++i) g(r, i) = ab(r, i);
      for (int j = 0; j < nn_; ++j) g(r, k_ + j) = -jp(j, r);
    }
    for (int gi = 0; gi < gauge; ++gi)
      for (int c = 0; c < cols; ++c) g(m_ + gi, c) = T(n0_(c, gi));
    std::vector<T> rhs(m_ + gauge, T(0));
    rhs[m_ + idx_] = T(1);
    std::vector<T> w = lstsq_normal(g, rhs);

    std::vector<T> xc(m_, T(0));
    for (int r = 0; r < m_; ++r)
      for (int i = 0; i < k_; ++i) xc[r] += xb(r, i) * w[i];
    for (int r = 0; r < nn_; ++r) {
      T s(0);
      for (int j = 0; j < m_; ++j) s += jp(r, j) * xc[j];
      out[r] = s;
    }
    for (int j = 0; j < nn_; ++j) out[nn_ + j] = w[k_ + j];
  }

 private:
  CorePtr sigma_, p_;
  std::vector<CorePtr> xs_, as_;
  Eigen::MatrixXd n0_;
  int idx_;
  int m_, nn_, k_;
};

// Extracts out[offset..offset+len) of the base map.
class SliceCore final : public TypedCore<SliceCore, 3> {
 public:
  SliceCore(CorePtr base, int offset, int len)
      : base_(std::move(base)), offset_(offset), len_(len) {}
  int in_dim() const override { return base_->in_dim(); }
  int out_dim() const override { return len_; }
  int depth() const override { return base_->depth(); }
  template <class T>
  void evalT(std::span<const T> x, std::span<T> y) const {
    std::vector<T> full(base_->out_dim());
    eval_map<T>(*base_, x, full);
    for (int i = 0; i < len_; ++i) y[i] = full[offset_ + i];
  }

 private:
  CorePtr base_;
  int offset_, len_;
};

[[noreturn]] void fail_at(const std::string& what, const ChartPoint& pt) {
  throw std::runtime_error(what + " at " + pt.chart + " " + point_string(pt.x));
}

}  // namespace

CheckReport check_quotient_model(const QuotientModel& q, const GroupActionData& act,
                                 const std::vector<ChartPoint>& n_samples, double section_tol,
                                 double kernel_tol, double rank_tol) {
  const int npts = static_cast<int>(n_samples.size());
  std::vector<double> sec(npts), ker(npts);
  std::vector<int> deficit(npts);
  auto fn = [&](int i) {
    const ChartPoint& pt = n_samples[i];
    Eigen::VectorXd x = q.sigma.values(pt.x);
    sec[i] = (q.p.values(x) - pt.x).norm();
    Eigen::MatrixXd dp = q.p.jacobian(x);
    deficit[i] = q.n_dim() - mat_rank(dp, rank_tol);
    ker[i] = subspace_distance(null_space(dp, rank_tol), generator_values(act, x), rank_tol);
    return std::max({sec[i] / section_tol, static_cast<double>(deficit[i]),
                     ker[i] / kernel_tol});
  };
  CheckReport rep =
      report_from_scan("quotient-model", "p after sigma = id and ker Dp = orbit span", 1.0,
                       n_samples, fn);
  int bad_rank = 0;
  for (int d : deficit)
    if (d > 0) ++bad_rank;
  std::ostringstream note;
  note << "max |p(sigma(y)) - y| = " << *std::max_element(sec.begin(), sec.end())
       << "; max kernel-span distance = " << *std::max_element(ker.begin(), ker.end());
  if (bad_rank > 0) note << "; Dp rank deficient at " << bad_rank << " of " << npts << " samples";
  rep.note = note.str();
  return rep;
}

void validate_quotient_model(const QuotientModel& q, const GroupActionData& act,
                             const std::vector<ChartPoint>& n_samples, double section_tol,
                             double kernel_tol, double rank_tol) {
  if (q.sigma.in_dim() != q.n_dim() || q.sigma.out_dim() != q.m_dim())
    throw std::invalid_argument("quotient model: sigma must map N into M");
  CheckReport rep =
      check_quotient_model(q, act, n_samples, section_tol, kernel_tol, rank_tol);
  if (rep.pass) return;
  // Recompute the three components at the worst point to name the violation.
  Eigen::VectorXd x = q.sigma.values(rep.worst_point);
  double sec = (q.p.values(x) - rep.worst_point).norm();
  Eigen::MatrixXd dp = q.p.jacobian(x);
  int deficit = q.n_dim() - mat_rank(dp, rank_tol);
  double ker = subspace_distance(null_space(dp, rank_tol), generator_values(act, x), rank_tol);
  std::ostringstream msg;
  msg << "quotient model invalid: ";
  if (deficit > 0)
    msg << "p is not a submersion (Dp rank deficit " << deficit << ")";
  else if (sec / section_tol >= ker / kernel_tol)
    msg << "sigma is not a section of p (|p(sigma(y)) - y| = " << sec << ")";
  else
    msg << "ker Dp does not match the orbit span (distance " << ker << ")";
  msg << " at " << rep.worst_chart << " " << point_string(rep.worst_point);
  throw std::runtime_error(msg.str());
}

std::vector<VectorField> orbit_distribution(const GroupActionData& act,
                                            const std::vector<ChartPoint>& samples,
                                            double rank_tol) {
  const int d = act.dim();
  ScanResult sc = scan_residuals(static_cast<int>(samples.size()), [&](int i) {
    return static_cast<double>(d - mat_rank(generator_values(act, samples[i].x), rank_tol));
  });
  for (size_t i = 0; i < sc.residuals.size(); ++i)
    if (sc.residuals[i] >= 1.0)
      fail_at("orbit distribution drops rank (action is not free)", samples[i]);
  return act.generators;
}

FiberBasis intersect_l_kperp(const DiracStructure& l, const GroupActionData& act,
                             const Eigen::VectorXd& x, double rank_tol) {
  Eigen::MatrixXd xb, ab;
  frame_values(l.frame, x, xb, ab);
  Eigen::MatrixXd gens = generator_values(act, x);
  // row u, column i: covector of section i against generator u
  Eigen::MatrixXd cond = gens.transpose() * ab;
  FiberBasis fb;
  fb.coeffs = null_space(cond, rank_tol);
  fb.stacked.resize(2 * xb.rows(), fb.coeffs.cols());
  fb.stacked.topRows(xb.rows()) = xb * fb.coeffs;
  fb.stacked.bottomRows(ab.rows()) = ab * fb.coeffs;
  return fb;
}

int l_kperp_constant_rank(const DiracStructure& l, const GroupActionData& act,
                          const std::vector<ChartPoint>& samples, double rank_tol) {
  if (samples.empty()) throw std::invalid_argument("l_kperp_constant_rank: no samples");
  const int n = static_cast<int>(samples.size());
  std::vector<int> ranks(n);
  scan_residuals(n, [&](int i) {
    ranks[i] = intersect_l_kperp(l, act, samples[i].x, rank_tol).rank();
    return 0.0;
  });
  for (int i = 1; i < n; ++i)
    if (ranks[i] != ranks[0]) {
      std::ostringstream msg;
      msg << "L cap Kperp rank varies: " << ranks[0] << " at " << samples[0].chart << " "
          << point_string(samples[0].x) << " vs " << ranks[i];
      fail_at(msg.str(), samples[i]);
    }
  return ranks[0];
}

int dim_k_cap_l(const DiracStructure& l, const GroupActionData& act, const Eigen::VectorXd& x,
                double rank_tol) {
  Eigen::MatrixXd xb, ab;
  frame_values(l.frame, x, xb, ab);
  Eigen::MatrixXd qg = col_space(generator_values(act, x), rank_tol);
  // frame coefficients with vanishing covector part and x part inside K
  Eigen::MatrixXd cond(2 * xb.rows(), xb.cols());
  cond.topRows(ab.rows()) = ab;
  cond.bottomRows(xb.rows()) = xb - qg * (qg.transpose() * xb);
  return static_cast<int>(null_space(cond, rank_tol).cols());
}

Eigen::MatrixXd pushforward_basis_at(const DiracStructure& l, const QuotientModel& q,
                                     const Eigen::VectorXd& x, double rank_tol) {
  Eigen::MatrixXd xb, ab;
  frame_values(l.frame, x, xb, ab);
  Eigen::MatrixXd dp = q.p.jacobian(x);
  Eigen::MatrixXd w = null_space(pushforward_constraints(ab, dp), rank_tol);
  Eigen::MatrixXd basis = col_space(downstairs_image(w, xb, dp), rank_tol);
  if (static_cast<int>(basis.cols()) != q.n_dim()) {
    std::ostringstream msg;
    msg << "pushforward rank " << basis.cols() << " != quotient dimension " << q.n_dim()
        << " at " << point_string(x);
    throw std::runtime_error(msg.str());
  }
  return basis;
}

Eigen::MatrixXd pushforward_dirac(const DiracStructure& l, const QuotientModel& q,
                                  const Eigen::VectorXd& y, double rank_tol) {
  return pushforward_basis_at(l, q, q.sigma.values(y), rank_tol);
}

SectionFrame pushforward_frame(const DiracStructure& l, const QuotientModel& q,
                               const Eigen::VectorXd& base_y, double rank_tol) {
  const int nn = q.n_dim();
  Eigen::VectorXd x0 = q.sigma.values(base_y);
  pushforward_basis_at(l, q, x0, rank_tol);  // fail early on rank defect

  Eigen::MatrixXd xb0, ab0;
  frame_values(l.frame, x0, xb0, ab0);
  Eigen::MatrixXd n0 =
      null_space(pushforward_constraints(ab0, q.p.jacobian(x0)), rank_tol);
  if (static_cast<int>(n0.cols()) < nn)
    throw std::runtime_error("pushforward frame: fiber solution space is too small at " +
                             point_string(base_y));

  std::vector<CorePtr> xs, as;
  for (const CourantSection& s : l.frame.sections) {
    xs.push_back(s.x_part.core_ptr());
    as.push_back(s.a_part.core_ptr());
  }
  SectionFrame f;
  f.declared_rank = nn;
  for (int j = 0; j < n0.cols(); ++j) {
    auto core = std::make_shared<PushSectionCore>(q.sigma.core_ptr(), q.p.core_ptr(), xs, as,
                                                  n0, j);
    f.sections.push_back(CourantSection{VectorField(std::make_shared<SliceCore>(core, 0, nn)),
                                        OneForm(std::make_shared<SliceCore>(core, nn, nn))});
  }
  return f;
}

ReducedAlgebroidFiber reduced_fiber(const DiracStructure& l, const GroupActionData& act,
                                    const QuotientModel& q, const Eigen::VectorXd& y,
                                    double rank_tol, double solve_tol) {
  ReducedAlgebroidFiber fiber;
  fiber.y = y;
  fiber.x = q.sigma.values(y);
  FiberBasis fb = intersect_l_kperp(l, act, fiber.x, rank_tol);
  fiber.coeffs = std::move(fb.coeffs);
  fiber.basis = std::move(fb.stacked);

  const int m = q.m_dim();
  Eigen::MatrixXd dp = q.p.jacobian(fiber.x);
  fiber.rho_red = dp * fiber.basis.topRows(m);
  fiber.mu_red.resize(q.n_dim(), fiber.rank());
  Eigen::MatrixXd dpt = dp.transpose();
  for (int j = 0; j < fiber.rank(); ++j) {
    Eigen::VectorXd alpha = fiber.basis.col(j).tail(m);
    Eigen::VectorXd beta = lstsq(dpt, alpha);
    // covectors of L cap Kperp annihilate ker Dp, so this system is
    // consistent; anything else is corrupted input
    if ((dpt * beta - alpha).norm() > solve_tol)
      throw std::runtime_error(
          "reduced covector is not a pullback through the quotient (fiber " +
          std::to_string(j) + ") at " + point_string(y));
    fiber.mu_red.col(j) = beta;
  }
  return fiber;
}

Eigen::VectorXd r_map(const ReducedAlgebroidFiber& fiber, const Eigen::VectorXd& coeffs) {
  if (coeffs.size() != fiber.rank())
    throw std::invalid_argument("r_map: coefficient length does not match the fiber rank");
  Eigen::VectorXd out(2 * fiber.rho_red.rows());
  out.head(fiber.rho_red.rows()) = fiber.rho_red * coeffs;
  out.tail(fiber.mu_red.rows()) = fiber.mu_red * coeffs;
  return out;
}

CheckReport check_lemma_2red(const DiracStructure& l, const GroupActionData& act,
                             const QuotientModel& q, const std::vector<ChartPoint>& n_samples,
                             double tol, const MatchedFrames* matched, double rank_tol) {
  if (matched && matched->upstairs.size() != matched->downstairs.size())
    throw std::invalid_argument("check_lemma_2red: matched frame sizes differ");
  const int npts = static_cast<int>(n_samples.size());
  const int nn = q.n_dim();
  std::vector<double> span_arr(npts, 0.0), cov_arr(npts, 0.0), mor_arr(npts, 0.0);
  std::vector<int> ker_arr(npts, 0);

  auto fn = [&](int i) {
    const ChartPoint& pt = n_samples[i];
    ReducedAlgebroidFiber fiber = reduced_fiber(l, act, q, pt.x, rank_tol);
    Eigen::MatrixXd basis = pushforward_basis_at(l, q, fiber.x, rank_tol);

    Eigen::MatrixXd r(2 * nn, fiber.rank());
    r.topRows(nn) = fiber.rho_red;
    r.bottomRows(nn) = fiber.mu_red;

    // (i) image of r spans the pushforward fiber
    span_arr[i] = subspace_distance(r, basis, rank_tol);

    // (ii) dim ker r vs dim(K cap L) upstairs
    int ker_r = fiber.rank() - mat_rank(r, rank_tol);
    ker_arr[i] = std::abs(ker_r - dim_k_cap_l(l, act, fiber.x, rank_tol));

    // (iii) covector part of the projection onto the fiber equals mu_red
    double cov = 0.0;
    for (int j = 0; j < fiber.rank(); ++j) {
      Eigen::VectorXd proj = basis * (basis.transpose() * r.col(j));
      cov = std::max(cov, (proj.tail(nn) - fiber.mu_red.col(j)).norm());
    }
    cov_arr[i] = cov;

    double mor = 0.0;
    if (matched) {
      const int kf = static_cast<int>(matched->upstairs.size());
      Eigen::MatrixXd dp = q.p.jacobian(fiber.x);
      Eigen::MatrixXd dpt = dp.transpose();
      std::vector<SectionJet> up(kf), down(kf);
      for (int a = 0; a < kf; ++a) {
        up[a] = section_jet(matched->upstairs[a], fiber.x);
        down[a] = section_jet(matched->downstairs[a], pt.x);
        // matching along sigma: Dp maps x parts, Dp^T pulls covectors back
        mor = std::max(mor, (dp * up[a].x - down[a].x).norm());
        mor = std::max(mor, (dpt * down[a].a - up[a].a).norm());
      }
      for (int a = 0; a < kf; ++a)
        for (int b = a + 1; b < kf; ++b) {
          SectionValue bu = courant_bracket_at(up[a], up[b]);
          SectionValue bd = courant_bracket_at(down[a], down[b]);
          Eigen::VectorXd beta = lstsq(dpt, bu.a);
          mor = std::max(mor, (dpt * beta - bu.a).norm());
          mor = std::max(mor, (dp * bu.x - bd.x).norm());
          mor = std::max(mor, (beta - bd.a).norm());
        }
    }
    mor_arr[i] = mor;

    return std::max({span_arr[i], static_cast<double>(ker_arr[i]), cov_arr[i], mor_arr[i]});
  };

  CheckReport rep = report_from_scan(
      "reduced-comparison", "fiber comparison map onto the pushforward structure", tol,
      n_samples, fn);
  int ker_bad = 0;
  for (int v : ker_arr)
    if (v > 0) ++ker_bad;
  std::ostringstream note;
  note << "span distance " << *std::max_element(span_arr.begin(), span_arr.end())
       << "; covector defect " << *std::max_element(cov_arr.begin(), cov_arr.end());
  if (matched)
    note << "; bracket morphism " << *std::max_element(mor_arr.begin(), mor_arr.end());
  if (ker_bad > 0)
    note << "; kernel dimension mismatch at " << ker_bad << " of " << npts << " samples";
  rep.note = note.str();
  return rep;
}

PredicateResult thm_red_predicate(const DiracStructure& l, const GroupActionData& act,
                                  const std::vector<ChartPoint>& m_samples, double rank_tol) {
  PredicateResult out;
  out.dims.resize(m_samples.size(), 0);
  out.report = report_from_scan("reduction-predicate", "dim(K cap L) = 0 at every sample", 0.5,
                                m_samples, [&](int i) {
                                  out.dims[i] = dim_k_cap_l(l, act, m_samples[i].x, rank_tol);
                                  return static_cast<double>(out.dims[i]);
                                });
  out.holds = out.report.pass;
  int worst = *std::max_element(out.dims.begin(), out.dims.end());
  std::ostringstream note;
  for (int d = 0; d <= worst; ++d) {
    int count = static_cast<int>(std::count(out.dims.begin(), out.dims.end(), d));
    if (count == 0) continue;
    if (note.tellp() > 0) note << "; ";
    note << "dim " << d << " at " << count << " samples";
  }
  out.report.note = note.str();
  return out;
}

Eigen::VectorXd rk4_step(const VectorField& f, const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd k1 = f.values(x);
  Eigen::VectorXd k2 = f.values(x + 0.5 * h * k1);
  Eigen::VectorXd k3 = f.values(x + 0.5 * h * k2);
  Eigen::VectorXd k4 = f.values(x + h * k3);
  return x + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

CheckReport check_pushforward_flow_invariance(const DiracStructure& l, const QuotientModel& q,
                                              const GroupActionData& act,
                                              const std::vector<ChartPoint>& n_samples,
                                              double h, double tol, double rank_tol) {
  // fixed unit-coefficient generator combination; any orbit direction works
  VectorField combo = act.generators[0];
  for (int u = 1; u < act.dim(); ++u) combo = field_sum(combo, act.generators[u]);
  combo = field_scale(combo, 1.0 / std::sqrt(static_cast<double>(act.dim())));

  const int npts = static_cast<int>(n_samples.size());
  std::vector<double> drift(npts, 0.0);
  auto fn = [&](int i) {
    Eigen::VectorXd x0 = q.sigma.values(n_samples[i].x);
    Eigen::VectorXd x1 = rk4_step(combo, x0, h);
    drift[i] = (q.p.values(x1) - q.p.values(x0)).norm();
    return subspace_distance(pushforward_basis_at(l, q, x0, rank_tol),
                             pushforward_basis_at(l, q, x1, rank_tol), rank_tol);
  };
  CheckReport rep = report_from_scan(
      "pushforward-flow-invariance", "pushforward fiber agrees at two orbit representatives",
      tol, n_samples, fn);
  std::ostringstream note;
  note << "step " << h << "; max fiber drift |p(x1) - p(x0)| = "
       << *std::max_element(drift.begin(), drift.end());
  rep.note = note.str();
  return rep;
}

}  // namespace dirac
