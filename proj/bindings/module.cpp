#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <variant>

#include "fgmrisk/aggregate_me.hpp"
#include "fgmrisk/allocation.hpp"
#include "fgmrisk/config.hpp"
#include "fgmrisk/copula.hpp"
#include "fgmrisk/discrete_agg.hpp"
#include "fgmrisk/mc_oracle.hpp"
#include "fgmrisk/moments.hpp"
#include "fgmrisk/reproduce.hpp"

namespace py = pybind11;
using namespace fgmrisk;

namespace {

// Wrapper so the stl variant caster does not intercept Marginal values.
struct PyMarginal {
  Marginal value;
};

std::vector<std::pair<SubsetMask, double>> entries_from_python(
    int dimension, const std::vector<std::pair<std::vector<int>, double>>& thetas) {
  std::vector<std::pair<SubsetMask, double>> out;
  out.reserve(thetas.size());
  for (const auto& [subset, value] : thetas) {
    out.emplace_back(subset_mask(subset, dimension), value);
  }
  return out;
}

MomentForm parse_form(const std::string& name) {
  if (name == "stochastic_min") return MomentForm::stochastic_min;
  if (name == "stochastic_max") return MomentForm::stochastic_max;
  if (name == "natural_a1") return MomentForm::natural_a1;
  if (name == "natural_a2") return MomentForm::natural_a2;
  throw validation_error("unknown moment form '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_fgmrisk, m) {
  m.doc() = "Risk aggregation for portfolios with FGM dependence";

  py::register_exception<validation_error>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<BernoulliScheme>(m, "BernoulliScheme")
      .def_static("dense", &BernoulliScheme::dense, py::arg("mass"))
      .def_static("exchangeable", &BernoulliScheme::exchangeable, py::arg("count_pmf"))
      .def_static("comonotone", &BernoulliScheme::comonotone, py::arg("dimension"))
      .def_static("end", &BernoulliScheme::end, py::arg("dimension"))
      .def_static("markov", &BernoulliScheme::markov, py::arg("dimension"), py::arg("alpha"))
      .def_static("independent", &BernoulliScheme::independent, py::arg("dimension"))
      .def_property_readonly("dimension", &BernoulliScheme::dimension)
      .def_property_readonly("variant", &BernoulliScheme::variant_name)
      .def("pmf",
           [](const BernoulliScheme& s, const std::vector<int>& bits) { return s.pmf(bits); })
      .def("central_mixed_moment",
           [](const BernoulliScheme& s, const std::vector<int>& subset) {
             return s.central_mixed_moment(subset);
           })
      .def("count_pmf", &BernoulliScheme::count_pmf)
      .def("expected_product",
           [](const BernoulliScheme& s, const std::vector<std::pair<double, double>>& g) {
             return s.expected_product<double>(g);
           })
      .def("sample",
           [](const BernoulliScheme& s, std::size_t n, std::uint64_t seed) {
             Rng rng(seed);
             py::array_t<int> out({n, static_cast<std::size_t>(s.dimension())});
             auto view = out.mutable_unchecked<2>();
             std::vector<int> bits(static_cast<std::size_t>(s.dimension()));
             for (std::size_t i = 0; i < n; ++i) {
               s.sample(rng, bits);
               for (int k = 0; k < s.dimension(); ++k) view(i, k) = bits[k];
             }
             return out;
           },
           py::arg("n"), py::arg("seed"))
      .def("__repr__", [](const BernoulliScheme& s) {
        std::ostringstream os;
        os << "BernoulliScheme(" << s.variant_name() << ", d=" << s.dimension() << ")";
        return os.str();
      });

  py::class_<FgmCopula>(m, "FgmCopula")
      .def(py::init([](int dimension,
                       const std::vector<std::pair<std::vector<int>, double>>& thetas) {
             return FgmCopula(dimension, entries_from_python(dimension, thetas));
           }),
           py::arg("dimension"), py::arg("thetas"))
      .def_property_readonly("dimension", &FgmCopula::dimension)
      .def_property_readonly("admissible",
                             [](const FgmCopula& c) { return c.admissible(); })
      .def("theta", [](const FgmCopula& c,
                       const std::vector<int>& subset) { return c.theta(subset); })
      .def("thetas",
           [](const FgmCopula& c) {
             std::vector<std::pair<std::vector<int>, double>> out;
             for (const auto& [mask, value] : c.entries()) {
               out.emplace_back(subset_coordinates(mask), value);
             }
             return out;
           })
      .def("cdf", [](const FgmCopula& c, const std::vector<double>& u) { return cdf(c, u); });

  m.def("scheme_cdf",
        [](const BernoulliScheme& s, const std::vector<double>& u) { return cdf(s, u); });
  m.def("theta_from_scheme", &theta_from_scheme, py::arg("scheme"), py::arg("max_order") = 0);
  m.def("scheme_from_theta", &scheme_from_theta, py::arg("copula"));
  m.def("end_thetas", &end_thetas, py::arg("dimension"));

  py::class_<PyMarginal>(m, "Marginal")
      .def_property_readonly("kind",
                             [](const PyMarginal& m_) { return variant_name(m_.value); })
      .def("cdf", [](const PyMarginal& m_, double x) { return cdf(m_.value, x); })
      .def("pdf", [](const PyMarginal& m_, double x) { return pdf(m_.value, x); })
      .def("quantile", [](const PyMarginal& m_, double u) { return quantile(m_.value, u); })
      .def("moment", [](const PyMarginal& m_, int order) { return moment(m_.value, order); })
      .def("mean", [](const PyMarginal& m_) { return mean(m_.value); })
      .def("variance", [](const PyMarginal& m_) { return variance(m_.value); })
      .def("os_moment",
           [](const PyMarginal& m_, int which, int order) {
             return os_moment(m_.value, which == 1 ? OrderStat::min : OrderStat::max, order);
           },
           py::arg("which"), py::arg("order"))
      .def("__repr__", [](const PyMarginal& m_) {
        return std::string("Marginal(") + variant_name(m_.value) + ")";
      });

  const auto make_marginal = [](Marginal value) {
    validate(value);
    return PyMarginal{std::move(value)};
  };
  m.def("exponential",
        [make_marginal](double rate) { return make_marginal(Exponential{rate}); },
        py::arg("rate"));
  m.def("mixed_erlang",
        [make_marginal](double rate, const std::vector<double>& weights) {
          return make_marginal(MixedErlang{rate, weights});
        },
        py::arg("rate"), py::arg("weights"));
  m.def("pareto_iv",
        [make_marginal](double location, double scale, double inequality, double shape) {
          return make_marginal(ParetoIV{location, scale, inequality, shape});
        },
        py::arg("location"), py::arg("scale"), py::arg("inequality"), py::arg("shape"));
  m.def("weibull",
        [make_marginal](double rate, double shape) {
          return make_marginal(Weibull{rate, shape});
        },
        py::arg("rate"), py::arg("shape"));
  m.def("lognormal",
        [make_marginal](double log_mean, double log_sd) {
          return make_marginal(LogNormal{log_mean, log_sd});
        },
        py::arg("log_mean"), py::arg("log_sd"));
  m.def("discrete",
        [make_marginal](double span, const std::vector<double>& masses) {
          return make_marginal(Discrete{span, masses});
        },
        py::arg("span"), py::arg("masses"));

  const auto unwrap = [](const std::vector<PyMarginal>& marginals) {
    std::vector<Marginal> out;
    out.reserve(marginals.size());
    for (const PyMarginal& m_ : marginals) out.push_back(m_.value);
    return out;
  };
  py::class_<Portfolio>(m, "Portfolio")
      .def(py::init([unwrap](const std::vector<PyMarginal>& marginals,
                             const BernoulliScheme& scheme) {
             Portfolio p{unwrap(marginals), scheme};
             validate(p);
             return p;
           }),
           py::arg("marginals"), py::arg("scheme"))
      .def(py::init([unwrap](const std::vector<PyMarginal>& marginals,
                             const FgmCopula& copula) {
             Portfolio p{unwrap(marginals), copula};
             validate(p);
             return p;
           }),
           py::arg("marginals"), py::arg("copula"))
      .def_property_readonly("dimension", &Portfolio::dimension);

  m.def("portfolio_from_config",
        [](const std::string& text) { return parse_config(text).build(); },
        "Build a portfolio from a JSON config document", py::arg("text"));

  py::class_<AggregateME>(m, "AggregateME")
      .def_property_readonly("rate", [](const AggregateME& a) { return a.law.rate; })
      .def_property_readonly("weights", [](const AggregateME& a) { return a.law.weights; })
      .def("mean", &AggregateME::mean)
      .def("variance", &AggregateME::variance)
      .def("cdf", [](const AggregateME& a, double x) { return a.cdf(x); })
      .def("pdf", [](const AggregateME& a, double x) { return a.pdf(x); })
      .def("lst", [](const AggregateME& a, double t) { return a.lst(t); })
      .def("value_at_risk", [](const AggregateME& a, double k) { return a.value_at_risk(k); },
           py::arg("kappa"))
      .def("tail_value_at_risk",
           [](const AggregateME& a, double k) { return a.tail_value_at_risk(k); },
           py::arg("kappa"));

  m.def("aggregate", [](const Portfolio& p) { return aggregate(p); }, py::arg("portfolio"));
  m.def("exp_iid_fast",
        [](int dimension, double rate, const BernoulliScheme& scheme) {
          return exp_iid_fast(dimension, rate, scheme);
        },
        py::arg("dimension"), py::arg("rate"), py::arg("scheme"));

  m.def("aggregate_moment",
        [](const Portfolio& p, int order, const std::string& form) {
          return aggregate_moment(p, MomentRequest{order, parse_form(form)});
        },
        py::arg("portfolio"), py::arg("order"), py::arg("form") = "stochastic_min");
  m.def("aggregate_variance", &aggregate_variance, py::arg("portfolio"));
  m.def("covariance", &covariance, py::arg("portfolio"), py::arg("j"), py::arg("k"));

  py::class_<Discrete>(m, "DiscreteLaw")
      .def_property_readonly("span", [](const Discrete& d) { return d.span; })
      .def_property_readonly("masses", [](const Discrete& d) { return d.masses; });
  m.def("discretize",
        [](const PyMarginal& m_, const std::string& method, double span) {
          const DiscretizationSpec spec{
              method == "lower" ? DiscretizationMethod::lower : DiscretizationMethod::upper,
              span};
          return discretize(m_.value, spec);
        },
        py::arg("marginal"), py::arg("method"), py::arg("span"));
  m.def("aggregate_pmf",
        [](const std::vector<PyMarginal>& marginals, const BernoulliScheme& scheme) {
          std::vector<Discrete> lattice;
          lattice.reserve(marginals.size());
          for (const PyMarginal& m_ : marginals) {
            if (const auto* d = std::get_if<Discrete>(&m_.value)) {
              lattice.push_back(*d);
            } else {
              throw validation_error("aggregate_pmf: every marginal must be discrete");
            }
          }
          return aggregate_pmf(DiscretePortfolio{std::move(lattice), scheme});
        },
        py::arg("marginals"), py::arg("scheme"));
  m.def("risk_measures",
        [](const Discrete& pmf, double kappa) {
          const RiskMeasures rm = risk_measures(pmf, kappa);
          return py::make_tuple(rm.value_at_risk, rm.tail_value_at_risk);
        },
        py::arg("pmf"), py::arg("kappa"));
  m.def("tvar_sandwich",
        [](const Portfolio& p, double span, double kappa) {
          const TvarSandwich sw = tvar_sandwich(p, span, kappa);
          return py::make_tuple(sw.lower, sw.upper);
        },
        py::arg("portfolio"), py::arg("span"), py::arg("kappa"));

  py::class_<AllocationResult>(m, "AllocationResult")
      .def_readonly("contributions", &AllocationResult::contributions)
      .def_readonly("context", &AllocationResult::context)
      .def_readonly("reference", &AllocationResult::reference);
  m.def("cmrs", [](const Portfolio& p, double s) { return cmrs(p, s); },
        py::arg("portfolio"), py::arg("s"));
  m.def("tvar_allocation",
        [](const Portfolio& p, double kappa) { return tvar_allocation(p, kappa); },
        py::arg("portfolio"), py::arg("kappa"));
  m.def("expected_allocation_density",
        [](const Portfolio& p, int risk, double s) {
          return expected_allocation_density(p, risk, s);
        },
        py::arg("portfolio"), py::arg("risk"), py::arg("s"));

  m.def("sample_portfolio",
        [](const Portfolio& p, std::size_t n, std::uint64_t seed) {
          const SampleBatch batch = sample_portfolio(p, n, seed);
          py::array_t<double> out({batch.n, static_cast<std::size_t>(batch.d)});
          auto view = out.mutable_unchecked<2>();
          for (std::size_t i = 0; i < batch.n; ++i) {
            for (int k = 0; k < batch.d; ++k) view(i, k) = batch.value(i, k);
          }
          return out;
        },
        py::arg("portfolio"), py::arg("n"), py::arg("seed"));
}
