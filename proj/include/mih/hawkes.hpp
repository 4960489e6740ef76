#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace mih {

using Rng = std::mt19937_64;

// Law of the volume V attached to each market order.
class MarkLaw {
 public:
  struct Dirac {
    double volume;
  };
  struct Exponential {
    double mean;
  };
  struct Empirical {
    std::vector<double> volumes;
    std::vector<double> weights;
  };

  static MarkLaw dirac(double volume);
  static MarkLaw exponential(double mean);
  static MarkLaw empirical(std::vector<double> volumes, std::vector<double> weights);

  double m1() const { return m1_; }
  double m2() const { return m2_; }

  // E[(V/m1)^p]; the normalized mark is taken as 0 when m1 == 0.
  double normalized_moment(double p) const;

  // Deterministic sample of the normalized support S(mu) used by the
  // linearity diagnostics: the single atom, a 64-point quantile grid of the
  // exponential law, or every empirical atom.
  std::vector<double> support_sample() const;

  bool is_dirac_zero() const;
  std::string describe() const;

  double sample(Rng& rng) const;

  const std::variant<Dirac, Exponential, Empirical>& kind() const { return kind_; }

 private:
  explicit MarkLaw(std::variant<Dirac, Exponential, Empirical> kind);

  std::variant<Dirac, Exponential, Empirical> kind_;
  double m1_ = 0.0;
  double m2_ = 0.0;
};

struct PowerTerm {
  double coef;
  double power;
};

// y -> sum_k coef_k * y^power_k on y >= 0.
class ExcitationFunction {
 public:
  ExcitationFunction() = default;
  explicit ExcitationFunction(std::vector<PowerTerm> terms);

  static ExcitationFunction constant(double c) { return ExcitationFunction({{c, 0.0}}); }
  static ExcitationFunction zero() { return ExcitationFunction(); }

  double operator()(double y) const;
  const std::vector<PowerTerm>& terms() const { return terms_; }

 private:
  std::vector<PowerTerm> terms_;
};

struct ExcitationPair {
  ExcitationFunction self;   // phi_s
  ExcitationFunction cross;  // phi_c
};

struct ExcitationMoments {
  double iota_s = 0.0;
  double iota_c = 0.0;
  double alpha = 0.0;        // iota_s - iota_c
  double alpha_tilde = 0.0;  // E[V (phi_s - phi_c)(V/m1)]
  double alpha_2 = 0.0;      // E[(phi_s - phi_c)^2(V/m1)]
  double phi_s_sq = 0.0;     // E[phi_s^2(V/m1)]
  double phi_c_sq = 0.0;     // E[phi_c^2(V/m1)]
};

ExcitationMoments excitation_moments(const ExcitationPair& excitation, const MarkLaw& marks);

class HawkesSpec {
 public:
  HawkesSpec(double beta, double kappa_infty, double kappa0_plus, double kappa0_minus, MarkLaw marks,
             ExcitationPair excitation);

  double beta() const { return beta_; }
  double kappa_infty() const { return kappa_infty_; }
  double kappa0_plus() const { return kappa0_plus_; }
  double kappa0_minus() const { return kappa0_minus_; }
  double delta0() const { return kappa0_plus_ - kappa0_minus_; }
  double sigma0() const { return kappa0_plus_ + kappa0_minus_; }
  const MarkLaw& marks() const { return marks_; }
  const ExcitationPair& excitation() const { return excitation_; }
  const ExcitationMoments& moments() const { return moments_; }

  double eta() const { return beta_ - moments_.alpha; }
  bool is_stationary() const { return moments_.iota_s + moments_.iota_c < beta_; }
  bool is_poisson() const;

  // Intensity jumps (kappa^+, kappa^-) caused by an order of the given side and volume.
  std::pair<double, double> intensity_jumps(int side, double volume) const;

  HawkesSpec with_initial_intensities(double plus, double minus) const;

 private:
  double beta_;
  double kappa_infty_;
  double kappa0_plus_;
  double kappa0_minus_;
  MarkLaw marks_;
  ExcitationPair excitation_;
  ExcitationMoments moments_;
};

struct StationarityReport {
  bool stable = false;
  // 2 beta kappa_infty / (beta - iota_s - iota_c) when stable.
  std::optional<double> stationary_mean_sigma;
};

StationarityReport stationarity(const HawkesSpec& spec);

struct Event {
  double tau;
  int side;  // +1 buy, -1 sell
  double volume;
  double delta_I;     // side * (phi_s - phi_c)(v/m1)
  double delta_Ibar;  // (phi_s + phi_c)(v/m1)

  double dN() const { return side * volume; }
};

// Immutable record of one simulated order flow on (0, T].
class EventPath {
 public:
  EventPath(double horizon, double beta, double kappa_infty, double kappa0_plus, double kappa0_minus,
            std::vector<Event> events);

  double horizon() const { return horizon_; }
  double beta() const { return beta_; }
  double kappa_infty() const { return kappa_infty_; }
  double kappa0_plus() const { return kappa0_plus_; }
  double kappa0_minus() const { return kappa0_minus_; }
  double delta0() const { return kappa0_plus_ - kappa0_minus_; }
  const std::vector<Event>& events() const { return events_; }
  std::size_t size() const { return events_.size(); }

  // chi_t: number of events with tau <= t.
  std::size_t count_until(double t) const;

  // Signed volume N_t (cadlag).
  double net_flow(double t) const;

 private:
  double horizon_;
  double beta_;
  double kappa_infty_;
  double kappa0_plus_;
  double kappa0_minus_;
  std::vector<Event> events_;
};

// Ogata thinning on (0, T]; deterministic given the generator state.
EventPath simulate(const HawkesSpec& spec, double horizon, Rng& rng);
EventPath simulate(const HawkesSpec& spec, double horizon, std::uint64_t seed);

struct MarkovState {
  double kappa_plus;
  double kappa_minus;
  double delta;
  double sigma;
  std::size_t chi;
  double theta;  // Theta_{chi_t} = sum_{l <= chi_t} e^{beta tau_l} dI_l
};

// Right-continuous state at t in [0, T], rebuilt from the event record.
MarkovState state_at(const EventPath& path, double t);

// Exact time integral of Sigma over [0, t].
double integrated_sigma(const EventPath& path, double t);

void write_event_path_csv(std::ostream& out, const EventPath& path);

}  // namespace mih
