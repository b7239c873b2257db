#ifndef OPALG_CERTIFY_HPP
#define OPALG_CERTIFY_HPP

// Interval replay of the explicit constant chain for the perturbation
// theorems. Each step compares a derived enclosure against a claimed bound;
// when a claim is certified it is carried forward as the hypothesis of the
// next step, otherwise the derived enclosure is carried.

#include <iomanip>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "opalg/interval.hpp"

namespace opalg {

enum class Status { certified, violated, inconclusive };

inline const char* to_string(Status s) {
  switch (s) {
    case Status::certified: return "certified";
    case Status::violated: return "violated";
    case Status::inconclusive: return "inconclusive";
  }
  return "?";
}

/// derived <= claimed, derived < claimed, derived >= claimed, or derived inside claimed
enum class Relation { le, lt, ge, within };

inline const char* to_string(Relation r) {
  switch (r) {
    case Relation::le: return "<=";
    case Relation::lt: return "<";
    case Relation::ge: return ">=";
    case Relation::within: return "in";
  }
  return "?";
}

struct ChainStep {
  std::string id;
  std::string description;
  Interval claimed;
  Interval derived;
  Relation relation = Relation::le;
  Status status = Status::inconclusive;
  std::string note;
};

inline Status decide(const Interval& derived, const Interval& claimed, Relation rel) {
  switch (rel) {
    case Relation::le:
      if (derived.hi() <= claimed.lo()) return Status::certified;
      if (derived.lo() > claimed.hi()) return Status::violated;
      return Status::inconclusive;
    case Relation::lt:
      if (derived.hi() < claimed.lo()) return Status::certified;
      if (derived.lo() >= claimed.hi()) return Status::violated;
      return Status::inconclusive;
    case Relation::ge:
      if (derived.lo() >= claimed.hi()) return Status::certified;
      if (derived.hi() < claimed.lo()) return Status::violated;
      return Status::inconclusive;
    case Relation::within:
      if (claimed.contains(derived)) return Status::certified;
      if (derived.hi() < claimed.lo() || derived.lo() > claimed.hi()) return Status::violated;
      return Status::inconclusive;
  }
  return Status::inconclusive;
}

struct ChainReport {
  std::string name;
  Interval input;
  std::vector<ChainStep> steps;
  std::map<std::string, double> facts;

  ChainStep add(std::string id, std::string description, const Interval& derived, const Interval& claimed,
                Relation rel = Relation::le, std::string note = {}) {
    ChainStep s{std::move(id), std::move(description), claimed, derived, rel, decide(derived, claimed, rel),
                std::move(note)};
    steps.push_back(std::move(s));
    return steps.back();
  }
  void add_inconclusive(std::string id, std::string description, std::string note) {
    ChainStep s;
    s.id = std::move(id);
    s.description = std::move(description);
    s.claimed = Interval(0.0);
    s.derived = Interval(0.0);
    s.status = Status::inconclusive;
    s.note = std::move(note);
    steps.push_back(std::move(s));
  }

  const ChainStep* find(const std::string& id) const {
    for (const auto& s : steps)
      if (s.id == id) return &s;
    return nullptr;
  }
  Status status_of(const std::string& id) const {
    const ChainStep* s = find(id);
    if (!s) throw ArgumentError("ChainReport: no step " + id);
    return s->status;
  }
  bool any(Status st) const {
    for (const auto& s : steps)
      if (s.status == st) return true;
    return false;
  }
  bool all_certified() const { return !steps.empty() && !any(Status::violated) && !any(Status::inconclusive); }
  std::vector<std::string> violated_ids() const {
    std::vector<std::string> out;
    for (const auto& s : steps)
      if (s.status == Status::violated) out.push_back(s.id);
    return out;
  }
};

inline void print_table(std::ostream& os, const ChainReport& r) {
  os << r.name << "  input " << std::setprecision(6) << r.input << '\n';
  for (const auto& s : r.steps) {
    std::ostringstream d, c;
    d << std::setprecision(8) << s.derived;
    c << std::setprecision(8) << s.claimed;
    os << "  " << std::left << std::setw(22) << s.id << std::setw(13) << to_string(s.status) << std::setw(40) << d.str()
       << std::setw(3) << to_string(s.relation) << ' ' << c.str();
    if (!s.note.empty()) os << "   " << s.note;
    os << '\n';
  }
  for (const auto& [k, v] : r.facts) os << "  " << k << " = " << std::setprecision(10) << v << '\n';
}

// ---------------------------------------------------------------------------
// closed forms

namespace bounds {

inline const Interval sqrt2 = sqrt(Interval(2.0));

/// ||S|| - 1 for ||S|| <= (1+d)/sqrt(2-(1+d)^2), written without cancellation:
/// (4d + 2d^2) / (r ((1+d) + r)),  r = sqrt(1 - 2d - d^2)
inline Interval unitized_norm_excess(const Interval& d) {
  const Interval r2 = Interval(1.0) - Interval(2.0) * d - square(d);
  if (r2.lo() <= 0.0) throw ArgumentError("unitized_norm_excess: requires (1+d)^2 < 2");
  const Interval r = sqrt(r2);
  return (Interval(4.0) * d + Interval(2.0) * square(d)) / (r * ((Interval(1.0) + d) + r));
}

/// mu for ||T|| <= 1 + a and ||T^{-1}|| <= 1 + b:
/// max{a, 1 - sqrt(q)} with q = 2/(1+b)^2 - (1+a)^2 and 1 - sqrt(q) = (1 - q)/(1 + sqrt(q))
inline Interval mu(const Interval& a, const Interval& b) {
  const Interval one_minus_q = a * (Interval(2.0) + a) + Interval(2.0) * b * (Interval(2.0) + b) / square(Interval(1.0) + b);
  const Interval q = Interval(1.0) - one_minus_q;
  if (q.lo() <= 0.0) throw ArgumentError("mu: requires ||T|| ||T^-1|| < sqrt(2)");
  return max(a, one_minus_q / (Interval(1.0) + sqrt(q)));
}

/// 2 sqrt((1 + a + mu/sqrt2)^2 - 1) = 2 sqrt(e (2 + e)), e = a + mu/sqrt2
inline Interval root_term(const Interval& a, const Interval& mu) {
  const Interval e = a + mu / sqrt2;
  return Interval(2.0) * sqrt(e * (Interval(2.0) + e));
}

/// multiplicativity bound  root + mu (1 + ||T||) with ||T|| = 1 + a
inline Interval defmult_mult(const Interval& a, const Interval& mu) {
  return root_term(a, mu) + mu * (Interval(2.0) + a);
}

/// selfadjointness bound  root + 2 mu
inline Interval defmult_sa(const Interval& a, const Interval& mu) { return root_term(a, mu) + Interval(2.0) * mu; }

/// ||x - uv|| <= 2 sqrt(c^2 - 1)
inline Interval unitmult(const Interval& c) {
  return Interval(2.0) * sqrt((c - Interval(1.0)) * (c + Interval(1.0)));
}

/// ||T(u)^{-1}|| <= ||T^{-1}|| / sqrt(2 - ||T||^2 ||T^{-1}||^2)
inline Interval imageunit(const Interval& norm, const Interval& inv_norm) {
  const Interval den = Interval(2.0) - square(norm * inv_norm);
  if (den.lo() <= 0.0) throw ArgumentError("imageunit: requires ||T|| ||T^-1|| < sqrt(2)");
  return inv_norm / sqrt(den);
}

}  // namespace bounds

// ---------------------------------------------------------------------------
// the chain

/// Replays the constant chain for delta = ||L^{-1}||_cb - 1 with ||L||_cb <= 1.
inline ChainReport replay_quant_chain(const Interval& delta) {
  using bounds::sqrt2;
  ChainReport rep;
  rep.name = "quant-chain";
  rep.input = delta;
  const Interval one(1.0);
  const Interval d = delta;
  if (d.lo() < 0.0) throw ArgumentError("replay_quant_chain: delta must be nonnegative");

  const char* ids[] = {"mu_S",      "S_norm",       "sa_defect_S",     "T_invertible", "T_norm",
                       "T_inv",     "T_defmult_hyp", "mu_T",           "f3_defmult_T", "f3_perturb_S",
                       "f3_gate",   "f6",           "dKK"};
  auto tail_inconclusive = [&](std::size_t from, const std::string& why) {
    for (std::size_t i = from; i < std::size(ids); ++i) rep.add_inconclusive(ids[i], "", why);
  };
  if (d.hi() > 0.1) {
    tail_inconclusive(0, "delta outside (0, 1/10]");
    return rep;
  }
  auto carry = [](const ChainStep& s) { return s.status == Status::certified ? s.claimed : s.derived; };

  const Interval sd = sqrt(d);
  // ||S|| - 1 and ||S^{-1}|| - 1
  const Interval s_exc = bounds::unitized_norm_excess(d);
  const Interval sinv_exc = d;

  const ChainStep mu_s =
      rep.add(ids[0], "mu(S)", bounds::mu(s_exc, sinv_exc), Interval(2.0) * d, Relation::le,
              "from ||S|| <= (1+d)/sqrt(2-(1+d)^2), ||S^-1|| <= 1+d");
  const Interval mu_s_c = carry(mu_s);
  const ChainStep s_norm = rep.add(ids[1], "||S|| - 1", s_exc, Interval(3.0) * d, Relation::lt);
  const Interval s_c = carry(s_norm);
  const ChainStep sa = rep.add(ids[2], "||S - S*||", bounds::defmult_sa(s_c, mu_s_c), Interval(10.0) * sd);
  const Interval f1 = carry(sa) / Interval(2.0);
  rep.add(ids[3], "||S^-1|| ||S - T|| (T invertible)", (one + d) * f1, one, Relation::lt);
  const ChainStep t_norm = rep.add(ids[4], "||T|| - 1", s_c + f1, Interval(6.0) * sd);
  const Interval t_c = carry(t_norm);

  const Interval k = (one + d) * f1;
  if (k.hi() >= 1.0) {
    tail_inconclusive(5, "||S^-1|| ||S - T|| not < 1");
    return rep;
  }
  const ChainStep t_inv = rep.add(ids[5], "||T^-1|| - 1", (d + k) / (one - k), Interval(8.0) * sd);
  const Interval ti_c = carry(t_inv);
  if (d.hi() >= 1.0 / 200.0) {
    tail_inconclusive(6, "delta not < 1/200");
    return rep;
  }

  const ChainStep hyp = rep.add(ids[6], "||T|| ||T^-1||", (one + t_c) * (one + ti_c), sqrt2, Relation::lt);
  if (hyp.status != Status::certified) {
    tail_inconclusive(7, "defect bound hypothesis for T not certified");
    return rep;
  }
  const ChainStep mu_t = rep.add(ids[7], "mu(T)", bounds::mu(t_c, ti_c), Interval(40.0) * sd);
  const Interval mu_t_c = carry(mu_t);
  const Interval f3_claim = Interval(180.0) * sd;
  const ChainStep f3a = rep.add(ids[8], "||T^-1|| ||T^v|| (defect bound on T)",
                                 (one + ti_c) * bounds::defmult_mult(t_c, mu_t_c), f3_claim);
  // T^v = S^v + E(ab) - S(a)E(b) - E(a)S(b) - E(a)E(b) with E = T - S, ||E|| <= f1
  const Interval s_vee = bounds::defmult_mult(s_c, mu_s_c);
  const Interval t_vee = s_vee + f1 * (one + Interval(2.0) * (one + s_c) + f1);
  const ChainStep f3b = rep.add(ids[9], "||T^-1|| ||T^v|| (perturbation of S)", (one + ti_c) * t_vee, f3_claim);
  const bool f3_ok = f3a.status == Status::certified || f3b.status == Status::certified;
  const Interval f3 = f3_ok ? f3_claim : min(f3a.derived, f3b.derived);
  rep.add(ids[10], "f3 < 1/11", f3, one / Interval(11.0), Relation::lt);
  const ChainStep f6 = rep.add(ids[11], "||L(1)^-1|| - 1", s_exc, Interval(3.0) * d);
  const Interval f6_c = carry(f6);
  const Interval f4 = Interval(10.0) * f3;
  rep.add(ids[12], "d_KK", Interval(2.0) * square(one + d) * (f4 + f1 + f6_c), Interval(3620.0) * sd);
  return rep;
}

/// 3620 sqrt(eps0) < 1/420000
inline ChainReport threshold_nuclear(const Interval& eps0 = Interval::around(3e-19)) {
  ChainReport rep;
  rep.name = "threshold-nuclear";
  rep.input = eps0;
  if (eps0.lo() < 0.0) throw ArgumentError("threshold_nuclear: eps0 must be nonnegative");
  rep.add("nuclear-dKK", "3620 sqrt(eps0)", Interval(3620.0) * sqrt(eps0), Interval(1.0) / Interval(420000.0),
          Relation::lt);
  rep.add("nuclear-f3-gate", "eps0", eps0, Interval::around(2e-7), Relation::lt);
  const Interval dmax = square(Interval(1.0) / (Interval(3620.0) * Interval(420000.0)));
  rep.facts["max_delta_lo"] = dmax.lo();
  rep.facts["max_delta_hi"] = dmax.hi();
  return rep;
}

/// 88 sqrt(delta) < 1/11 at the claimed threshold, next to the directly
/// evaluated ||S^-1|| ||S^v|| from the defect bound.
inline ChainReport threshold_vn(const Interval& delta = Interval::around(4e-6)) {
  ChainReport rep;
  rep.name = "threshold-vn";
  rep.input = delta;
  if (delta.lo() < 0.0) throw ArgumentError("threshold_vn: delta must be nonnegative");
  const Interval one(1.0);
  const Interval gate = one / Interval(11.0);
  const Interval sd = sqrt(delta);
  rep.add("vn-epsilon0", "88 sqrt(delta)", Interval(88.0) * sd, gate, Relation::lt, "claimed constant, delta = eps0");
  if (delta.hi() <= 0.1) {
    const Interval s_exc = bounds::unitized_norm_excess(delta);
    const Interval direct = (one + delta) * bounds::defmult_mult(s_exc, bounds::mu(s_exc, delta));
    rep.add("vn-direct", "||S^-1|| ||S^v|| from the defect bound", direct, gate, Relation::lt,
            "second reading: constant recomputed, delta = eps0");
    rep.add("vn-88", "||S^-1|| ||S^v|| vs 88 sqrt(delta)", direct, Interval(88.0) * sd);
  } else {
    rep.add_inconclusive("vn-direct", "||S^-1|| ||S^v|| from the defect bound", "delta outside (0, 1/10]");
    rep.add_inconclusive("vn-88", "||S^-1|| ||S^v|| vs 88 sqrt(delta)", "delta outside (0, 1/10]");
  }
  const Interval dmax = square(one / (Interval(11.0) * Interval(88.0)));
  rep.facts["max_delta_lo"] = dmax.lo();
  rep.facts["max_delta_hi"] = dmax.hi();
  return rep;
}

/// delta = 1e-4 4^-l K^-2 implies 88 sqrt(delta) 2^(l-1) < 1/K.
inline ChainReport threshold_length(int ell, const Interval& k) {
  if (ell < 1) throw ArgumentError("threshold_length: length must be >= 1");
  if (!(k.lo() >= 1.0)) throw ArgumentError("threshold_length: K must be >= 1");
  ChainReport rep;
  rep.name = "threshold-length";
  const Interval one(1.0);
  const Interval delta = Interval::around(1e-4) * pow(Interval(4.0), -ell) / square(k);
  rep.input = delta;
  const Interval two_pow = pow(Interval(2.0), ell - 1);
  // sum_{j=0}^{l-2} ||S||^j with ||S|| <= 1 + 3 delta
  Interval geo(0.0);
  Interval term(1.0);
  for (int j = 0; j <= ell - 2; ++j) {
    geo += term;
    term *= one + Interval(3.0) * delta;
  }
  rep.add("length-geometric", "sum (1+3 delta)^j", geo, two_pow);
  const Interval lhs = Interval(88.0) * sqrt(delta) * two_pow;
  const Interval rhs = one / k;
  const ChainStep g = rep.add("length-gate", "88 sqrt(delta) 2^(l-1)", lhs, rhs, Relation::lt);
  const Interval slack = g.claimed - g.derived;
  rep.facts["length"] = ell;
  rep.facts["K"] = k.mid();
  rep.facts["slack_lo"] = slack.lo();
  rep.facts["relative_slack_lo"] = (slack / rhs).lo();
  return rep;
}

inline ChainReport threshold_length(int ell, double k) { return threshold_length(ell, Interval(k)); }

/// Sanity checks on the lemma bounds: values at the isometric point,
/// nonnegativity and monotonicity on parameter grids.
inline ChainReport lemma_constant_checks() {
  ChainReport rep;
  rep.name = "lemma-constants";
  const Interval one(1.0);
  const Interval zero(0.0);

  rep.add("unitmult-c1", "2 sqrt(c^2-1) at c = 1", bounds::unitmult(one), zero, Relation::within);
  rep.add("unitmult-range", "2 sqrt(c^2-1), c in [1.0001, 1.0002]",
          bounds::unitmult(Interval(Interval::around(1.0001).lo(), Interval::around(1.0002).hi())),
          Interval(0.0282, 0.0401), Relation::within);
  rep.add("imageunit-iso", "imageunit bound at ||T|| = ||T^-1|| = 1", bounds::imageunit(one, one), one,
          Relation::within);
  rep.add("defmult-mult-iso", "multiplicativity bound at ||T|| = 1, mu = 0", bounds::defmult_mult(zero, zero), zero,
          Relation::within);
  rep.add("defmult-sa-iso", "selfadjointness bound at ||T|| = 1, mu = 0", bounds::defmult_sa(zero, zero), zero,
          Relation::within);
  rep.add("mu-iso", "mu at ||T|| = ||T^-1|| = 1", bounds::mu(zero, zero), zero, Relation::within);

  // grids: cell j covers [j h, (j+1) h]
  const int n = 40;
  auto cell = [](double h, int j) { return Interval(j * h, (j + 1) * h); };
  auto node = [](double h, int j) { return Interval(j * h) * Interval(1.0); };

  double min_val = std::numeric_limits<double>::infinity();
  double min_gap_c = min_val;
  for (int j = 0; j < n; ++j) {
    const Interval c = one + cell(0.01, j);
    min_val = std::min(min_val, bounds::unitmult(c).lo());
    min_gap_c = std::min(min_gap_c, (bounds::unitmult(one + node(0.01, j + 1)) - bounds::unitmult(one + node(0.01, j))).lo());
  }
  rep.add("unitmult-nonneg", "min of 2 sqrt(c^2-1) over c in [1, 1.4]", Interval(min_val), zero, Relation::ge);
  rep.add("unitmult-monotone", "min increment along c", Interval(min_gap_c), zero, Relation::ge);

  // defmult bounds over a in [0, 0.1], mu in [0, 0.1]
  double min_mult = std::numeric_limits<double>::infinity(), min_sa = min_mult;
  double gap_mult_a = min_mult, gap_mult_mu = min_mult, gap_sa_a = min_mult, gap_sa_mu = min_mult;
  const double h = 0.1 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Interval a = cell(h, i), m = cell(h, j);
      min_mult = std::min(min_mult, bounds::defmult_mult(a, m).lo());
      min_sa = std::min(min_sa, bounds::defmult_sa(a, m).lo());
      const Interval a0 = node(h, i), a1 = node(h, i + 1), m0 = node(h, j), m1 = node(h, j + 1);
      gap_mult_a = std::min(gap_mult_a, (bounds::defmult_mult(a1, m0) - bounds::defmult_mult(a0, m0)).lo());
      gap_mult_mu = std::min(gap_mult_mu, (bounds::defmult_mult(a0, m1) - bounds::defmult_mult(a0, m0)).lo());
      gap_sa_a = std::min(gap_sa_a, (bounds::defmult_sa(a1, m0) - bounds::defmult_sa(a0, m0)).lo());
      gap_sa_mu = std::min(gap_sa_mu, (bounds::defmult_sa(a0, m1) - bounds::defmult_sa(a0, m0)).lo());
    }
  rep.add("defmult-mult-nonneg", "min multiplicativity bound on grid", Interval(min_mult), zero, Relation::ge);
  rep.add("defmult-sa-nonneg", "min selfadjointness bound on grid", Interval(min_sa), zero, Relation::ge);
  rep.add("defmult-mult-monotone-norm", "min increment along ||T||", Interval(gap_mult_a), zero, Relation::ge);
  rep.add("defmult-mult-monotone-mu", "min increment along mu", Interval(gap_mult_mu), zero, Relation::ge);
  rep.add("defmult-sa-monotone-norm", "min increment along ||T||", Interval(gap_sa_a), zero, Relation::ge);
  rep.add("defmult-sa-monotone-mu", "min increment along mu", Interval(gap_sa_mu), zero, Relation::ge);

  // imageunit over ||T||, ||T^-1|| in [1, 1.1]
  double min_iu = std::numeric_limits<double>::infinity(), gap_iu_n = min_iu, gap_iu_i = min_iu;
  const double g = 0.1 / n;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      min_iu = std::min(min_iu, bounds::imageunit(one + cell(g, i), one + cell(g, j)).lo());
      const Interval n0 = one + node(g, i), n1 = one + node(g, i + 1), i0 = one + node(g, j), i1 = one + node(g, j + 1);
      gap_iu_n = std::min(gap_iu_n, (bounds::imageunit(n1, i0) - bounds::imageunit(n0, i0)).lo());
      gap_iu_i = std::min(gap_iu_i, (bounds::imageunit(n0, i1) - bounds::imageunit(n0, i0)).lo());
    }
  rep.add("imageunit-lower", "min imageunit bound on grid", Interval(min_iu), one, Relation::ge);
  rep.add("imageunit-monotone-norm", "min increment along ||T||", Interval(gap_iu_n), zero, Relation::ge);
  rep.add("imageunit-monotone-inv", "min increment along ||T^-1||", Interval(gap_iu_i), zero, Relation::ge);
  return rep;
}

}  // namespace opalg

#endif  // OPALG_CERTIFY_HPP
