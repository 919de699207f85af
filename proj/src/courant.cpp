#include <dirac/courant.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace dirac {
namespace {

int frame_rank(const Eigen::MatrixXd& m, double rank_tol, double* min_sigma) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  const auto& s = svd.singularValues();
  if (min_sigma) *min_sigma = s.size() ? s(s.size() - 1) : 0.0;
  int r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) > rank_tol) ++r;
  return r;
}

}  // namespace

double pairing(const CourantSection& s1, const CourantSection& s2, const Eigen::VectorXd& x) {
  return s2.a_part.values(x).dot(s1.x_part.values(x)) +
         s1.a_part.values(x).dot(s2.x_part.values(x));
}

ScalarField section_pairing_field(const CourantSection& s1, const CourantSection& s2) {
  return field_sum(pairing_field(s2.a_part, s1.x_part), pairing_field(s1.a_part, s2.x_part));
}

CourantSection courant_bracket(const CourantSection& s1, const CourantSection& s2) {
  VectorField x = lie_bracket(s1.x_part, s2.x_part);
  OneForm a = field_sum(lie_derivative_oneform(s1.x_part, s2.a_part),
                        interior_product(s2.x_part, exterior_derivative(s1.a_part)), 1.0, -1.0);
  return CourantSection{std::move(x), std::move(a)};
}

Eigen::VectorXd SectionValue::stacked() const {
  Eigen::VectorXd v(x.size() + a.size());
  v << x, a;
  return v;
}

SectionValue courant_bracket_at(const SectionJet& s1, const SectionJet& s2) {
  SectionValue out;
  out.x = s2.jx * s1.x - s1.jx * s2.x;
  // L_X b = Jb X + JX^T b  (product rule),  i_Y da = Ja Y - Ja^T Y
  out.a = s2.ja * s1.x + s1.jx.transpose() * s2.a - s1.ja * s2.x + s1.ja.transpose() * s2.x;
  return out;
}

double pairing_at(const SectionJet& s1, const SectionJet& s2) {
  return s2.a.dot(s1.x) + s1.a.dot(s2.x);
}

std::vector<SectionJet> frame_jets(const SectionFrame& f, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  const int k = f.size();
  std::vector<SectionJet> jets(k);

  if (const auto* pi = std::get_if<BivectorField>(&f.source)) {
    // one matrix jet gives every section: section i is (row i of P, dx_i)
    Jet pj = eval_jet(pi->core(), x);
    for (int i = 0; i < k; ++i) {
      SectionJet& s = jets[i];
      s.x.resize(n);
      s.jx.resize(n, n);
      for (int j = 0; j < n; ++j) {
        s.x(j) = pj.value(i * n + j);
        s.jx.row(j) = pj.jac.row(i * n + j);
      }
      s.a = Eigen::VectorXd::Unit(n, i);
      s.ja = Eigen::MatrixXd::Zero(n, n);
    }
    return jets;
  }
  if (const auto* w = std::get_if<TwoForm>(&f.source)) {
    // section i is (d_i, row i of w)
    Jet wj = eval_jet(w->core(), x);
    for (int i = 0; i < k; ++i) {
      SectionJet& s = jets[i];
      s.x = Eigen::VectorXd::Unit(n, i);
      s.jx = Eigen::MatrixXd::Zero(n, n);
      s.a.resize(n);
      s.ja.resize(n, n);
      for (int j = 0; j < n; ++j) {
        s.a(j) = wj.value(i * n + j);
        s.ja.row(j) = wj.jac.row(i * n + j);
      }
    }
    return jets;
  }

  for (int i = 0; i < k; ++i) {
    Jet jx = eval_jet(f.sections[i].x_part.core(), x);
    Jet ja = eval_jet(f.sections[i].a_part.core(), x);
    jets[i] = SectionJet{std::move(jx.value), std::move(ja.value), std::move(jx.jac),
                         std::move(ja.jac)};
  }
  return jets;
}

Eigen::MatrixXd frame_matrix(const std::vector<SectionJet>& jets) {
  if (jets.empty()) return {};
  const int n = static_cast<int>(jets[0].x.size());
  Eigen::MatrixXd m(2 * n, static_cast<int>(jets.size()));
  for (size_t i = 0; i < jets.size(); ++i) {
    m.col(static_cast<int>(i)).head(n) = jets[i].x;
    m.col(static_cast<int>(i)).tail(n) = jets[i].a;
  }
  return m;
}

DiracStructure graph_of_poisson(const BivectorField& pi) {
  const int n = pi.n();
  SectionFrame f;
  f.declared_rank = n;
  f.source = pi;
  for (int i = 0; i < n; ++i)
    f.sections.push_back(
        CourantSection{sharp(pi, coordinate_one_form(n, i)), coordinate_one_form(n, i)});
  return DiracStructure{std::move(f)};
}

DiracStructure graph_of_twoform(const TwoForm& w) {
  const int n = w.n();
  SectionFrame f;
  f.declared_rank = n;
  f.source = w;
  for (int i = 0; i < n; ++i)
    f.sections.push_back(
        CourantSection{basis_vector_field(n, i), interior_product(basis_vector_field(n, i), w)});
  return DiracStructure{std::move(f)};
}

DiracStructure tangent_dirac(int n) {
  SectionFrame f;
  f.declared_rank = n;
  for (int i = 0; i < n; ++i)
    f.sections.push_back(CourantSection{basis_vector_field(n, i), zero_one_form(n)});
  return DiracStructure{std::move(f)};
}

DiracStructure cotangent_dirac(int n) {
  SectionFrame f;
  f.declared_rank = n;
  for (int i = 0; i < n; ++i)
    f.sections.push_back(CourantSection{zero_vector_field(n), coordinate_one_form(n, i)});
  return DiracStructure{std::move(f)};
}

CheckReport check_lagrangian(const SectionFrame& f, const std::vector<ChartPoint>& samples,
                             double tol, const FrameCheckOptions& opts) {
  const int n_pts = static_cast<int>(samples.size());
  std::vector<double> sigmas(n_pts, 0.0);
  std::vector<int> ranks(n_pts, 0);

  auto fn = [&](int p) {
    const Eigen::VectorXd& x = samples[p].x;
    auto jets = frame_jets(f, x);
    double iso = 0.0;
    for (size_t i = 0; i < jets.size(); ++i)
      for (size_t j = i; j < jets.size(); ++j)
        iso = std::max(iso, std::abs(pairing_at(jets[i], jets[j])));
    int want = opts.expect_rank.value_or(static_cast<int>(x.size()));
    int r = frame_rank(frame_matrix(jets), opts.rank_tol, &sigmas[p]);
    ranks[p] = r;
    return std::max(iso, static_cast<double>(std::abs(r - want)));
  };

  CheckReport rep = report_from_scan("lagrangian", "max|<s_i,s_j>| and rank(frame) = dim", tol,
                                     samples, fn);
  double min_sigma = sigmas.empty() ? 0.0 : *std::min_element(sigmas.begin(), sigmas.end());
  int bad_rank = 0;
  int want0 = samples.empty()
                  ? 0
                  : opts.expect_rank.value_or(static_cast<int>(samples[0].x.size()));
  for (int r : ranks)
    if (r != want0) ++bad_rank;
  std::ostringstream note;
  note << "min singular value " << min_sigma;
  if (bad_rank > 0)
    note << "; rank != " << want0 << " at " << bad_rank << " of " << n_pts << " samples";
  rep.note = note.str();
  return rep;
}

CheckReport check_involutive(const SectionFrame& f, const std::vector<ChartPoint>& samples,
                             double tol, const FrameCheckOptions& opts) {
  (void)opts;
  auto fn = [&](int p) {
    const Eigen::VectorXd& x = samples[p].x;
    auto jets = frame_jets(f, x);
    Eigen::MatrixXd m = frame_matrix(jets);
    double worst = 0.0;
    for (size_t i = 0; i < jets.size(); ++i)
      for (size_t j = i + 1; j < jets.size(); ++j) {
        Eigen::VectorXd b = courant_bracket_at(jets[i], jets[j]).stacked();
        worst = std::max(worst, lstsq_residual(m, b));
      }
    return worst;
  };
  return report_from_scan("involutive", "dist([[s_i,s_j]], span(frame))", tol, samples, fn);
}

DiracStructure dirac_from_im(const std::vector<VectorField>& anchors,
                             const std::vector<OneForm>& mu,
                             const std::vector<ChartPoint>& samples, double rank_tol) {
  if (anchors.size() != mu.size())
    throw std::invalid_argument("anchor and form lists have different lengths");
  if (anchors.empty()) throw std::invalid_argument("empty section list");
  const int n = anchors[0].in_dim();
  const int k = static_cast<int>(anchors.size());
  if (k != n)
    throw std::invalid_argument("need exactly " + std::to_string(n) + " sections, got " +
                                std::to_string(k));

  SectionFrame f;
  f.declared_rank = n;
  for (int i = 0; i < k; ++i) f.sections.push_back(CourantSection{anchors[i], mu[i]});

  for (const ChartPoint& p : samples) {
    auto jets = frame_jets(f, p.x);
    int r = frame_rank(frame_matrix(jets), rank_tol, nullptr);
    if (r < n)
      throw std::runtime_error("anchor/form pairs have a common kernel (stacked rank " +
                               std::to_string(r) + " < " + std::to_string(n) + ") at " +
                               p.chart + " " + point_string(p.x));
  }
  return DiracStructure{std::move(f)};
}

double jacobi_residual(const BivectorField& pi, const Eigen::VectorXd& x) {
  const int n = static_cast<int>(x.size());
  Jet j = eval_jet(pi.core(), x);
  auto p = [&](int a, int b) { return j.value(a * n + b); };
  auto dp = [&](int a, int b, int c) { return j.jac(a * n + b, c); };
  double worst = 0.0;
  for (int i = 0; i < n; ++i)
    for (int jj = i + 1; jj < n; ++jj)
      for (int k = jj + 1; k < n; ++k) {
        double cyc = 0.0;
        for (int b = 0; b < n; ++b)
          cyc += p(i, b) * dp(jj, k, b) + p(jj, b) * dp(k, i, b) + p(k, b) * dp(i, jj, b);
        worst = std::max(worst, std::abs(cyc));
      }
  return worst;
}

}  // namespace dirac
