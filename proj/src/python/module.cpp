#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "abcx/codec.hpp"
#include "abcx/exponents.hpp"
#include "abcx/info.hpp"
#include "abcx/oracle.hpp"
#include "abcx/simulate.hpp"

namespace py = pybind11;
using namespace abcx;

namespace {

Channel make_channel(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw std::invalid_argument("channel: non-empty matrix expected");
    }
    return Channel(Alphabet(rows.size()), Alphabet(rows.front().size()),
                   std::vector<std::vector<double>>(rows));
}

py::dict report_dict(const ExponentReport& rep) {
    py::dict d;
    d["e1_bound"] = rep.e1_bound;
    d["e1hat_bound"] = rep.e1hat_bound;
    d["e2_bound"] = rep.e2_bound;
    d["e2hat_bound"] = rep.e2hat_bound;
    d["pen_low"] = rep.pen_low.value;
    d["pen_high"] = rep.pen_high.value;
    d["joint_low"] = rep.joint_low.value;
    d["marg_low"] = rep.marg_low.value;
    d["marg_high"] = rep.marg_high.value;
    d["delta12"] = rep.delta12;
    d["delta2"] = rep.delta2;
    return d;
}

}  // namespace

PYBIND11_MODULE(abcx, m) {
    m.doc() = "Error/erasure exponents and decoder simulation for broadcast channels with "
              "degraded message sets. All rates and exponents are in bits.";

    py::class_<Distribution>(m, "Distribution")
        .def(py::init([](const std::vector<double>& p) {
                 return Distribution(Alphabet(p.size()), std::vector<double>(p));
             }),
             py::arg("probs"))
        .def_property_readonly("probs", &Distribution::probs)
        .def("__len__", &Distribution::size);

    py::class_<Channel>(m, "Channel")
        .def(py::init(&make_channel), py::arg("rows"))
        .def_property_readonly("in_size", &Channel::in_size)
        .def_property_readonly("out_size", &Channel::out_size)
        .def("row", [](const Channel& c, std::size_t u) {
            auto r = c.row(u);
            return std::vector<double>(r.begin(), r.end());
        });

    py::class_<UxDist>(m, "UxDist")
        .def(py::init(&UxDist::from_matrix), py::arg("matrix"))
        .def_property_readonly("u_size", &UxDist::u_size)
        .def_property_readonly("x_size", &UxDist::x_size)
        .def("p", &UxDist::p);

    py::class_<JointType>(m, "JointType")
        .def(py::init<std::vector<std::size_t>, std::vector<std::int64_t>, std::int64_t>(),
             py::arg("sizes"), py::arg("counts"), py::arg("n"))
        .def_property_readonly("n", &JointType::n)
        .def_property_readonly("sizes", &JointType::sizes)
        .def_property_readonly("counts", &JointType::counts);

    py::class_<RateConfig>(m, "RateConfig")
        .def(py::init<double, double, double, double, double, double>(), py::arg("r1"),
             py::arg("r2"), py::arg("r1_tilde"), py::arg("r2_tilde"), py::arg("lambda12"),
             py::arg("lambda2"))
        .def_property_readonly("r1", &RateConfig::r1)
        .def_property_readonly("r2", &RateConfig::r2)
        .def_property_readonly("r12", &RateConfig::r12)
        .def_property_readonly("delta2", &RateConfig::delta2)
        .def_property_readonly("delta12", &RateConfig::delta12);

    py::class_<SolverSettings>(m, "SolverSettings")
        .def(py::init<>())
        .def_readwrite("grid_k", &SolverSettings::grid_k)
        .def_readwrite("descent_steps", &SolverSettings::descent_steps)
        .def_readwrite("shrink", &SolverSettings::shrink)
        .def_readwrite("tolerance", &SolverSettings::tolerance)
        .def_readwrite("starts", &SolverSettings::starts);

    m.def("entropy", [](const std::vector<double>& p) { return entropy_bits(p); }, py::arg("p"));
    m.def("mutual_information", &mutual_information, py::arg("input"), py::arg("channel"));
    m.def("conditional_mutual_information", &conditional_mutual_information, py::arg("p_ux"),
          py::arg("v"));
    m.def("conditional_kl", &conditional_kl, py::arg("v"), py::arg("w"), py::arg("p"));
    m.def("empirical_mutual_info", &empirical_mutual_info, py::arg("a"), py::arg("b"),
          py::arg("a_size"), py::arg("b_size"));
    m.def("joint_type_of", &joint_type_of, py::arg("seqs"), py::arg("sizes"));

    m.def(
        "exponent_marginal",
        [](double lambda, double r2, const UxDist& p, const Channel& w, const SolverSettings& s) {
            return exponent_marginal(lambda, r2, p, w, s).value;
        },
        py::arg("lambda_"), py::arg("r2"), py::arg("p_ux"), py::arg("w_y"),
        py::arg("settings") = SolverSettings{});
    m.def(
        "exponent_joint",
        [](double lambda, double r1, double r2, const UxDist& p, const Channel& w,
           const SolverSettings& s) { return exponent_joint(lambda, r1, r2, p, w, s).value; },
        py::arg("lambda_"), py::arg("r1"), py::arg("r2"), py::arg("p_ux"), py::arg("w_y"),
        py::arg("settings") = SolverSettings{});
    m.def(
        "exponent_penalized",
        [](double lambda, double r1, double r2, double r2_pen, const UxDist& p, const Channel& w,
           const SolverSettings& s) {
            return exponent_penalized(lambda, r1, r2, r2_pen, p, w, s).value;
        },
        py::arg("lambda_"), py::arg("r1"), py::arg("r2"), py::arg("r2_pen"), py::arg("p_ux"),
        py::arg("w_y"), py::arg("settings") = SolverSettings{});
    m.def(
        "sphere_packing",
        [](double r, const UxDist& p, const Channel& w, const SolverSettings& s) {
            return sphere_packing(r, p, w, s).value;
        },
        py::arg("r"), py::arg("p_ux"), py::arg("w_y"), py::arg("settings") = SolverSettings{});
    m.def(
        "theorem_bounds",
        [](const RateConfig& rc, const UxDist& p, const Channel& w, const SolverSettings& s) {
            return report_dict(theorem_bounds(rc, p, w, s));
        },
        py::arg("rates"), py::arg("p_ux"), py::arg("w_y"), py::arg("settings") = SolverSettings{});
    m.def(
        "rate_region_check",
        [](const UxDist& p, const Channel& w_y, const Channel& w_z, double r1, double r2) {
            const RegionCheck rcheck = rate_region_check(p, w_y, w_z, r1, r2);
            py::dict d;
            d["inside"] = rcheck.inside;
            d["i_xy_given_u"] = rcheck.i_xy_given_u;
            d["i_uz"] = rcheck.i_uz;
            d["i_xy"] = rcheck.i_xy;
            d["slack_r1"] = rcheck.slack_r1;
            d["slack_r2"] = rcheck.slack_r2;
            d["slack_sum"] = rcheck.slack_sum;
            return d;
        },
        py::arg("p_ux"), py::arg("w_y"), py::arg("w_z"), py::arg("r1"), py::arg("r2"));

    py::class_<DecodeOutcome> outcome(m, "DecodeOutcome");
    outcome
        .def_property_readonly("msg1",
                               [](const DecodeOutcome& o) -> py::object {
                                   if (o.msg1) return py::int_(*o.msg1);
                                   return py::none();
                               })
        .def_property_readonly("msg2",
                               [](const DecodeOutcome& o) -> py::object {
                                   if (o.msg2) return py::int_(*o.msg2);
                                   return py::none();
                               })
        .def_property_readonly("stage", [](const DecodeOutcome& o) {
            switch (o.stage) {
                case DecodeOutcome::Stage::Step1: return 1;
                case DecodeOutcome::Stage::Step2: return 2;
                default: return 0;
            }
        });

    py::class_<Codebook>(m, "Codebook")
        .def_property_readonly("n", [](const Codebook& c) { return c.n; })
        .def_property_readonly("m1", &Codebook::m1_count)
        .def_property_readonly("m2", &Codebook::m2_count)
        .def_property_readonly("clouds", [](const Codebook& c) { return c.clouds; })
        .def_property_readonly("satellites", [](const Codebook& c) { return c.satellites; });

    m.def("sample_codebook", &sample_codebook, py::arg("p_ux"), py::arg("r1"), py::arg("r2"),
          py::arg("seed"), py::arg("message_cap") = std::size_t{1} << 20);
    m.def("decode_y", &decode_y, py::arg("y"), py::arg("codebook"), py::arg("rates"),
          py::arg("y_size"));
    m.def("decode_y_exhaustive", &decode_y_exhaustive, py::arg("y"), py::arg("codebook"),
          py::arg("rates"), py::arg("y_size"));
    m.def(
        "decode_z",
        [](const std::vector<int>& z, const Codebook& cb, const RateConfig& rc,
           std::size_t z_size) -> py::object {
            const auto out = decode_z(z, cb, rc, z_size);
            if (out) return py::int_(*out);
            return py::none();
        },
        py::arg("z"), py::arg("codebook"), py::arg("rates"), py::arg("z_size"));

    py::class_<TrialTally>(m, "TrialTally")
        .def_readonly("trials", &TrialTally::trials)
        .def_readonly("n", &TrialTally::n)
        .def_readonly("msg1_undetected", &TrialTally::msg1_undetected)
        .def_readonly("msg1_erased", &TrialTally::msg1_erased)
        .def_readonly("msg2_undetected", &TrialTally::msg2_undetected)
        .def_readonly("msg2_erased", &TrialTally::msg2_erased)
        .def_readonly("step1_decoded", &TrialTally::step1_decoded)
        .def_readonly("step2_decoded", &TrialTally::step2_decoded)
        .def_readonly("double_erasure", &TrialTally::double_erasure);

    m.def(
        "run_trials",
        [](const JointType& p_ux, const Channel& w_y, const RateConfig& rc, std::int64_t trials,
           std::uint64_t seed, const std::string& policy, int threads) {
            const CodebookPolicy cp =
                policy == "fixed" ? CodebookPolicy::Fixed : CodebookPolicy::FreshPerTrial;
            return run_trials(p_ux, w_y, rc, trials, seed, cp, threads);
        },
        py::arg("p_ux"), py::arg("w_y"), py::arg("rates"), py::arg("trials"), py::arg("seed"),
        py::arg("policy") = "fresh", py::arg("threads") = 1);
    m.def("quantize_to_type", &quantize_to_type, py::arg("target"), py::arg("n"));

    m.def(
        "exact_error_probs",
        [](const Codebook& cb, const Channel& w_y, const RateConfig& rc, std::size_t m1,
           std::size_t m2) {
            const ExactErrorProbs e = exact_error_probs(cb, w_y, rc, m1, m2);
            py::dict d;
            d["e1_total"] = e.e1_total;
            d["e1_undetected"] = e.e1_undetected;
            d["e2_total"] = e.e2_total;
            d["e2_undetected"] = e.e2_undetected;
            d["total_mass"] = e.total_mass;
            return d;
        },
        py::arg("codebook"), py::arg("w_y"), py::arg("rates"), py::arg("m1") = 0,
        py::arg("m2") = 0);
    m.def(
        "grid_exponent",
        [](const std::string& objective, double lambda, double r1, double r2, double r2_pen,
           double r_cap, const UxDist& p, const Channel& w, std::int64_t k) {
            GridObjective obj;
            if (objective == "marginal") obj = GridObjective::Marginal;
            else if (objective == "joint") obj = GridObjective::Joint;
            else if (objective == "penalized") obj = GridObjective::Penalized;
            else if (objective == "sphere_packing") obj = GridObjective::SpherePacking;
            else throw std::invalid_argument("grid_exponent: unknown objective " + objective);
            return grid_exponent(obj, GridParams{lambda, r1, r2, r2_pen, r_cap}, p, w, k);
        },
        py::arg("objective"), py::arg("lambda_"), py::arg("r1"), py::arg("r2"),
        py::arg("r2_pen"), py::arg("r_cap"), py::arg("p_ux"), py::arg("w_y"), py::arg("k"));
}
