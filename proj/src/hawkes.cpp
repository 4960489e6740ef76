#include "mih/hawkes.hpp"

#include "mih/special_functions.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mih {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require_finite_nonnegative(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw std::invalid_argument(std::string(what) + " must be finite and nonnegative");
  }
}

double power_or_one(double y, double p) { return p == 0.0 ? 1.0 : std::pow(y, p); }

}  // namespace

// ---------------------------------------------------------------- MarkLaw

MarkLaw::MarkLaw(std::variant<Dirac, Exponential, Empirical> kind) : kind_(std::move(kind)) {
  std::visit(Overloaded{
                 [this](const Dirac& d) {
                   m1_ = d.volume;
                   m2_ = d.volume * d.volume;
                 },
                 [this](const Exponential& e) {
                   m1_ = e.mean;
                   m2_ = 2.0 * e.mean * e.mean;
                 },
                 [this](const Empirical& e) {
                   m1_ = 0.0;
                   m2_ = 0.0;
                   for (std::size_t i = 0; i < e.volumes.size(); ++i) {
                     m1_ += e.weights[i] * e.volumes[i];
                     m2_ += e.weights[i] * e.volumes[i] * e.volumes[i];
                   }
                 },
             },
             kind_);
}

MarkLaw MarkLaw::dirac(double volume) {
  require_finite_nonnegative(volume, "Dirac volume");
  return MarkLaw(Dirac{volume});
}

MarkLaw MarkLaw::exponential(double mean) {
  if (!std::isfinite(mean) || !(mean > 0.0)) {
    throw std::invalid_argument("Exponential mark mean must be positive");
  }
  return MarkLaw(Exponential{mean});
}

MarkLaw MarkLaw::empirical(std::vector<double> volumes, std::vector<double> weights) {
  if (volumes.empty() || volumes.size() != weights.size()) {
    throw std::invalid_argument("Empirical mark law needs matching, nonempty volumes and weights");
  }
  double total = 0.0;
  for (std::size_t i = 0; i < volumes.size(); ++i) {
    require_finite_nonnegative(volumes[i], "Empirical volume");
    require_finite_nonnegative(weights[i], "Empirical weight");
    total += weights[i];
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("Empirical weights must sum to 1 (got " + std::to_string(total) + ")");
  }
  return MarkLaw(Empirical{std::move(volumes), std::move(weights)});
}

double MarkLaw::normalized_moment(double p) const {
  if (m1_ == 0.0) return p == 0.0 ? 1.0 : 0.0;
  return std::visit(Overloaded{
                        [](const Dirac&) { return 1.0; },
                        [p](const Exponential&) { return std::tgamma(1.0 + p); },
                        [this, p](const Empirical& e) {
                          double s = 0.0;
                          for (std::size_t i = 0; i < e.volumes.size(); ++i) {
                            if (e.weights[i] == 0.0) continue;
                            s += e.weights[i] * power_or_one(e.volumes[i] / m1_, p);
                          }
                          return s;
                        },
                    },
                    kind_);
}

std::vector<double> MarkLaw::support_sample() const {
  if (m1_ == 0.0) return {0.0};
  return std::visit(Overloaded{
                        [](const Dirac&) { return std::vector<double>{1.0}; },
                        [](const Exponential&) {
                          std::vector<double> ys(64);
                          for (int i = 0; i < 64; ++i) ys[i] = -std::log1p(-(i + 0.5) / 64.0);
                          return ys;
                        },
                        [this](const Empirical& e) {
                          std::vector<double> ys;
                          for (std::size_t i = 0; i < e.volumes.size(); ++i) {
                            if (e.weights[i] > 0.0) ys.push_back(e.volumes[i] / m1_);
                          }
                          return ys;
                        },
                    },
                    kind_);
}

bool MarkLaw::is_dirac_zero() const { return m2_ == 0.0; }

std::string MarkLaw::describe() const {
  std::ostringstream os;
  std::visit(Overloaded{
                 [&os](const Dirac& d) { os << "Dirac(" << d.volume << ")"; },
                 [&os](const Exponential& e) { os << "Exponential(mean " << e.mean << ")"; },
                 [&os](const Empirical& e) { os << "Empirical(" << e.volumes.size() << " atoms)"; },
             },
             kind_);
  return os.str();
}

double MarkLaw::sample(Rng& rng) const {
  return std::visit(Overloaded{
                        [](const Dirac& d) { return d.volume; },
                        [&rng](const Exponential& e) {
                          // Inverse transform keeps the draw count fixed at one per mark.
                          const double u = std::generate_canonical<double, 53>(rng);
                          return -e.mean * std::log1p(-u);
                        },
                        [&rng](const Empirical& e) {
                          const double u = std::generate_canonical<double, 53>(rng);
                          double acc = 0.0;
                          for (std::size_t i = 0; i < e.volumes.size(); ++i) {
                            acc += e.weights[i];
                            if (u < acc) return e.volumes[i];
                          }
                          return e.volumes.back();
                        },
                    },
                    kind_);
}

// ------------------------------------------------------- ExcitationFunction

ExcitationFunction::ExcitationFunction(std::vector<PowerTerm> terms) : terms_(std::move(terms)) {
  for (std::size_t k = 0; k < terms_.size(); ++k) {
    const auto& t = terms_[k];
    if (!std::isfinite(t.coef) || t.coef < 0.0 || !std::isfinite(t.power) || t.power < 0.0) {
      std::ostringstream os;
      os << "power term " << k << " (coef " << t.coef << ", power " << t.power
         << ") must have finite coef >= 0 and power >= 0";
      throw std::invalid_argument(os.str());
    }
  }
}

double ExcitationFunction::operator()(double y) const {
  double s = 0.0;
  for (const auto& t : terms_) s += t.coef * power_or_one(y, t.power);
  return s;
}

ExcitationMoments excitation_moments(const ExcitationPair& excitation, const MarkLaw& marks) {
  auto moment = [&marks](double p, const char* fn, std::size_t k) {
    const double m = marks.normalized_moment(p);
    if (!std::isfinite(m)) {
      std::ostringstream os;
      os << "divergent moment E[y^" << p << "] under " << marks.describe() << " from " << fn << " term " << k;
      throw std::domain_error(os.str());
    }
    return m;
  };
  const auto& s = excitation.self.terms();
  const auto& c = excitation.cross.terms();

  ExcitationMoments out;
  for (std::size_t k = 0; k < s.size(); ++k) {
    out.iota_s += s[k].coef * moment(s[k].power, "phi_s", k);
    out.alpha_tilde += marks.m1() * s[k].coef * moment(s[k].power + 1.0, "phi_s", k);
  }
  for (std::size_t k = 0; k < c.size(); ++k) {
    out.iota_c += c[k].coef * moment(c[k].power, "phi_c", k);
    out.alpha_tilde -= marks.m1() * c[k].coef * moment(c[k].power + 1.0, "phi_c", k);
  }
  out.alpha = out.iota_s - out.iota_c;

  auto cross_moment = [&](const std::vector<PowerTerm>& f, const char* fn_f, const std::vector<PowerTerm>& g,
                          const char* fn_g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) {
      for (std::size_t j = 0; j < g.size(); ++j) {
        acc += f[i].coef * g[j].coef * moment(f[i].power + g[j].power, i <= j ? fn_f : fn_g, i <= j ? i : j);
      }
    }
    return acc;
  };
  out.phi_s_sq = cross_moment(s, "phi_s", s, "phi_s");
  out.phi_c_sq = cross_moment(c, "phi_c", c, "phi_c");
  out.alpha_2 = out.phi_s_sq + out.phi_c_sq - 2.0 * cross_moment(s, "phi_s", c, "phi_c");
  if (!std::isfinite(out.alpha_2) || !std::isfinite(out.alpha_tilde)) {
    throw std::domain_error("excitation moments are not finite");
  }
  // Round-off can push a vanishing second moment slightly negative.
  out.alpha_2 = std::max(out.alpha_2, 0.0);
  return out;
}

// --------------------------------------------------------------- HawkesSpec

HawkesSpec::HawkesSpec(double beta, double kappa_infty, double kappa0_plus, double kappa0_minus, MarkLaw marks,
                       ExcitationPair excitation)
    : beta_(beta),
      kappa_infty_(kappa_infty),
      kappa0_plus_(kappa0_plus),
      kappa0_minus_(kappa0_minus),
      marks_(std::move(marks)),
      excitation_(std::move(excitation)) {
  require_finite_nonnegative(beta_, "beta");
  require_finite_nonnegative(kappa_infty_, "kappa_infty");
  require_finite_nonnegative(kappa0_plus_, "kappa0_plus");
  require_finite_nonnegative(kappa0_minus_, "kappa0_minus");
  moments_ = excitation_moments(excitation_, marks_);
}

bool HawkesSpec::is_poisson() const {
  return beta_ == 0.0 && excitation_.self.terms().empty() && excitation_.cross.terms().empty();
}

std::pair<double, double> HawkesSpec::intensity_jumps(int side, double volume) const {
  const double y = marks_.m1() > 0.0 ? volume / marks_.m1() : 0.0;
  const double js = excitation_.self(y);
  const double jc = excitation_.cross(y);
  return side > 0 ? std::pair{js, jc} : std::pair{jc, js};
}

HawkesSpec HawkesSpec::with_initial_intensities(double plus, double minus) const {
  return HawkesSpec(beta_, kappa_infty_, plus, minus, marks_, excitation_);
}

StationarityReport stationarity(const HawkesSpec& spec) {
  StationarityReport r;
  const auto& m = spec.moments();
  r.stable = m.iota_s + m.iota_c < spec.beta();
  if (r.stable) {
    r.stationary_mean_sigma = 2.0 * spec.beta() * spec.kappa_infty() / (spec.beta() - m.iota_s - m.iota_c);
  }
  return r;
}

// ---------------------------------------------------------------- EventPath

EventPath::EventPath(double horizon, double beta, double kappa_infty, double kappa0_plus, double kappa0_minus,
                     std::vector<Event> events)
    : horizon_(horizon),
      beta_(beta),
      kappa_infty_(kappa_infty),
      kappa0_plus_(kappa0_plus),
      kappa0_minus_(kappa0_minus),
      events_(std::move(events)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) throw std::invalid_argument("horizon must be positive");
  double prev = 0.0;
  for (const auto& e : events_) {
    if (!(e.tau > prev) || e.tau > horizon_) {
      throw std::invalid_argument("event times must be strictly increasing in (0, T]");
    }
    if (e.side != 1 && e.side != -1) throw std::invalid_argument("event side must be +1 or -1");
    prev = e.tau;
  }
}

std::size_t EventPath::count_until(double t) const {
  auto it = std::upper_bound(events_.begin(), events_.end(), t,
                             [](double x, const Event& e) { return x < e.tau; });
  return static_cast<std::size_t>(it - events_.begin());
}

double EventPath::net_flow(double t) const {
  const std::size_t n = count_until(t);
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += events_[i].dN();
  return s;
}

EventPath simulate(const HawkesSpec& spec, double horizon, Rng& rng) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw std::invalid_argument("simulate: T must be positive");
  const double beta = spec.beta();
  const double kinf = spec.kappa_infty();
  double kp = spec.kappa0_plus();
  double km = spec.kappa0_minus();
  double t = 0.0;
  std::vector<Event> events;

  const double m1 = spec.marks().m1();
  const auto& phi_s = spec.excitation().self;
  const auto& phi_c = spec.excitation().cross;

  while (true) {
    const double bound = std::max(kp, kinf) + std::max(km, kinf);
    if (!(bound > 0.0)) break;
    if (!std::isfinite(bound)) throw std::runtime_error("simulate: non-finite intensity");
    const double u_wait = std::generate_canonical<double, 53>(rng);
    const double wait = -std::log1p(-u_wait) / bound;
    const double t_next = t + wait;
    if (t_next > horizon) break;
    const double decay = std::exp(-beta * (t_next - t));
    kp = kinf + (kp - kinf) * decay;
    km = kinf + (km - kinf) * decay;
    t = t_next;
    const double u_accept = std::generate_canonical<double, 53>(rng);
    const double total = kp + km;
    if (u_accept * bound > total) continue;
    if (!events.empty() && !(t > events.back().tau)) continue;  // zero wait is a measure-zero tie
    const double u_side = std::generate_canonical<double, 53>(rng);
    const int side = u_side * total < kp ? 1 : -1;
    const double v = spec.marks().sample(rng);
    const double y = m1 > 0.0 ? v / m1 : 0.0;
    const double js = phi_s(y);
    const double jc = phi_c(y);
    if (side > 0) {
      kp += js;
      km += jc;
    } else {
      kp += jc;
      km += js;
    }
    events.push_back(Event{t, side, v, side * (js - jc), js + jc});
  }
  return EventPath(horizon, beta, kinf, spec.kappa0_plus(), spec.kappa0_minus(), std::move(events));
}

EventPath simulate(const HawkesSpec& spec, double horizon, std::uint64_t seed) {
  Rng rng(seed);
  return simulate(spec, horizon, rng);
}

MarkovState state_at(const EventPath& path, double t) {
  if (!(t >= 0.0) || t > path.horizon()) throw std::invalid_argument("state_at: t outside [0, T]");
  const double beta = path.beta();
  const double kinf = path.kappa_infty();
  MarkovState s{};
  s.chi = path.count_until(t);
  const double base_decay = std::exp(-beta * t);
  double jp = 0.0;
  double jm = 0.0;
  double theta = 0.0;
  const auto& ev = path.events();
  for (std::size_t i = 0; i < s.chi; ++i) {
    const double w = std::exp(-beta * (t - ev[i].tau));
    jp += w * 0.5 * (ev[i].delta_Ibar + ev[i].delta_I);
    jm += w * 0.5 * (ev[i].delta_Ibar - ev[i].delta_I);
    theta += std::exp(beta * ev[i].tau) * ev[i].delta_I;
  }
  s.kappa_plus = kinf + (path.kappa0_plus() - kinf) * base_decay + jp;
  s.kappa_minus = kinf + (path.kappa0_minus() - kinf) * base_decay + jm;
  s.delta = s.kappa_plus - s.kappa_minus;
  s.sigma = s.kappa_plus + s.kappa_minus;
  s.theta = theta;
  return s;
}

double integrated_sigma(const EventPath& path, double t) {
  if (!(t >= 0.0) || t > path.horizon()) throw std::invalid_argument("integrated_sigma: t outside [0, T]");
  const double beta = path.beta();
  const double kinf = path.kappa_infty();
  auto decay_integral = [beta](double h) { return h * zeta(beta * h); };
  const double excess = path.kappa0_plus() + path.kappa0_minus() - 2.0 * kinf;
  double acc = 2.0 * kinf * t + excess * decay_integral(t);
  for (const auto& e : path.events()) {
    if (e.tau > t) break;
    acc += e.delta_Ibar * decay_integral(t - e.tau);
  }
  return acc;
}

void write_event_path_csv(std::ostream& out, const EventPath& path) {
  out << "tau,side,volume,delta_I,delta_Ibar\n";
  out << std::setprecision(17);
  for (const auto& e : path.events()) {
    out << e.tau << ',' << e.side << ',' << e.volume << ',' << e.delta_I << ',' << e.delta_Ibar << '\n';
  }
}

}  // namespace mih
