// Python face of the library. Exposes the operations behind each CLI
// subcommand so scenarios can be explored interactively: efficiency
// families, the one-shot equilibrium, channel dynamics, grid solvers, the
// finite-population simulator, and the mean-field loop. Interference paths
// and feedback policies cross the boundary as plain callables.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "powermfg/config.hpp"
#include "powermfg/dynamics.hpp"
#include "powermfg/efficiency.hpp"
#include "powermfg/grid.hpp"
#include "powermfg/hjb.hpp"
#include "powermfg/kplayer.hpp"
#include "powermfg/mfg.hpp"
#include "powermfg/static_game.hpp"

namespace py = pybind11;
using namespace powermfg;

PYBIND11_MODULE(_core, m) {
    m.doc() = "energy-efficient power-control games: static equilibria, "
              "battery/channel dynamics, grid solvers, finite populations, "
              "and the mean-field equilibrium loop";
    m.attr("__version__") = kVersion;

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

    py::class_<Vec2>(m, "Vec2")
        .def(py::init<>())
        .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
        .def_readwrite("x", &Vec2::x)
        .def_readwrite("y", &Vec2::y)
        .def("norm2", &Vec2::norm2)
        .def("__repr__", [](const Vec2& v) {
            std::ostringstream os;
            os << "Vec2(" << v.x << ", " << v.y << ")";
            return os.str();
        });

    py::class_<GenericState>(m, "State")
        .def(py::init<>())
        .def(py::init([](double energy, Vec2 h) {
                 return GenericState{energy, h};
             }),
             py::arg("energy"), py::arg("h"))
        .def_readwrite("energy", &GenericState::energy)
        .def_readwrite("h", &GenericState::h);

    py::class_<GameParams>(m, "GameParams")
        .def(py::init<>())
        .def_readwrite("k", &GameParams::k)
        .def_readwrite("rate", &GameParams::rate)
        .def_readwrite("sigma2", &GameParams::sigma2)
        .def_readwrite("mu", &GameParams::mu)
        .def_readwrite("eta", &GameParams::eta)
        .def_readwrite("p_max", &GameParams::p_max)
        .def_readwrite("t0", &GameParams::t0)
        .def_readwrite("t1", &GameParams::t1)
        .def_readwrite("terminal_weight", &GameParams::terminal_weight);

    // Efficiency family and its cached analytics.
    py::class_<HamiltonianResult>(m, "HamiltonianResult")
        .def_readonly("value", &HamiltonianResult::value)
        .def_readonly("p_star", &HamiltonianResult::p_star);

    py::class_<ExistenceReport>(m, "ExistenceReport")
        .def_readonly("thetas", &ExistenceReport::thetas)
        .def_readonly("margins", &ExistenceReport::margins)
        .def_readonly("min_margin", &ExistenceReport::min_margin)
        .def_readonly("degenerate", &ExistenceReport::degenerate);

    py::class_<Efficiency>(m, "Efficiency")
        .def_static("exponential_ratio", &Efficiency::exponential_ratio, py::arg("a"))
        .def_static("cumulative_sigmoid", &Efficiency::cumulative_sigmoid, py::arg("m"))
        .def("f", &Efficiency::f, py::arg("x"))
        .def("df", &Efficiency::df, py::arg("x"))
        .def("ddf", &Efficiency::ddf, py::arg("x"))
        .def("g", &Efficiency::g, py::arg("x"))
        .def("inflection", &Efficiency::inflection)
        .def("beta_star", &Efficiency::beta_star)
        .def("theta_max", &Efficiency::theta_max)
        .def("theta_max_arg", &Efficiency::theta_max_arg)
        .def("max_ddf", &Efficiency::max_ddf)
        .def("gamma_star", &Efficiency::gamma_star, py::arg("theta"))
        .def("hamiltonian", &Efficiency::hamiltonian, py::arg("c"), py::arg("v_e"),
             py::arg("rate"), py::arg("p_max"))
        .def("existence_check", &Efficiency::existence_check, py::arg("theta_grid"));

    // One-shot game.
    py::class_<StaticProfile>(m, "StaticProfile")
        .def(py::init([](std::vector<double> powers, std::vector<double> gains,
                         double sigma2, double rate) {
                 return StaticProfile{std::move(powers), std::move(gains), sigma2, rate};
             }),
             py::arg("powers"), py::arg("gains"), py::arg("sigma2") = 1.0,
             py::arg("rate") = 1.0)
        .def_readwrite("powers", &StaticProfile::powers)
        .def_readwrite("gains", &StaticProfile::gains)
        .def_readwrite("sigma2", &StaticProfile::sigma2)
        .def_readwrite("rate", &StaticProfile::rate);

    py::class_<NeResult>(m, "NeResult")
        .def_readonly("powers", &NeResult::powers)
        .def_readonly("exceeds_p_max", &NeResult::exceeds_p_max);

    m.def("static_ne", &static_ne, py::arg("gains"), py::arg("sigma2"),
          py::arg("eff"), py::arg("p_max") = std::numeric_limits<double>::infinity());
    m.def("sinr", &sinr, py::arg("profile"), py::arg("i"));
    m.def("utility", &utility, py::arg("profile"), py::arg("i"), py::arg("eff"));
    m.def("best_response", &best_response, py::arg("profile"), py::arg("i"),
          py::arg("eff"), py::arg("p_max"), py::arg("grid_size") = 2000);

    // Battery/channel dynamics.
    py::class_<OUParams>(m, "OUParams")
        .def(py::init<>())
        .def(py::init([](Vec2 mu, double eta) {
                 return OUParams{mu, eta};
             }),
             py::arg("mu"), py::arg("eta"))
        .def_readwrite("mu", &OUParams::mu)
        .def_readwrite("eta", &OUParams::eta);

    py::class_<ChannelMoments>(m, "ChannelMoments")
        .def_readonly("mean", &ChannelMoments::mean)
        .def_readonly("ex2", &ChannelMoments::ex2)
        .def_readonly("ey2", &ChannelMoments::ey2)
        .def("second", &ChannelMoments::second)
        .def("variance", &ChannelMoments::variance);

    py::class_<ChannelPathSpec>(m, "ChannelPathSpec")
        .def(py::init<>())
        .def_readwrite("n_paths", &ChannelPathSpec::n_paths)
        .def_readwrite("n_steps", &ChannelPathSpec::n_steps)
        .def_readwrite("dt", &ChannelPathSpec::dt)
        .def_readwrite("power", &ChannelPathSpec::power)
        .def_readwrite("e0", &ChannelPathSpec::e0)
        .def_readwrite("h0", &ChannelPathSpec::h0)
        .def_readwrite("exact", &ChannelPathSpec::exact);

    m.def("step_state", &step_state, py::arg("state"), py::arg("p"), py::arg("dt"),
          py::arg("ou"), py::arg("z"));
    m.def("step_state_exact", &step_state_exact, py::arg("state"), py::arg("p"),
          py::arg("dt"), py::arg("ou"), py::arg("z"));
    m.def("transient_moments", &transient_moments, py::arg("h0"), py::arg("ou"),
          py::arg("t"));
    m.def("stationary_density", &stationary_density, py::arg("h"), py::arg("ou"));
    m.def("simulate_channel_paths", &simulate_channel_paths, py::arg("spec"),
          py::arg("ou"), py::arg("seed"), py::arg("n_threads") = 1,
          py::call_guard<py::gil_scoped_release>());

    // Lattice and fields.
    py::class_<Axis>(m, "Axis")
        .def(py::init<>())
        .def(py::init([](double lo, double hi, int n) {
                 return Axis{lo, hi, n};
             }),
             py::arg("lo"), py::arg("hi"), py::arg("n"))
        .def_readwrite("lo", &Axis::lo)
        .def_readwrite("hi", &Axis::hi)
        .def_readwrite("n", &Axis::n)
        .def("step", &Axis::step)
        .def("coord", &Axis::coord, py::arg("i"));

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<>())
        .def_static("centered", &GridSpec::centered, py::arg("gp"), py::arg("e_max"),
                    py::arg("n_e"), py::arg("n_x"), py::arg("n_y"), py::arg("n_t"),
                    py::arg("width") = 4.0)
        .def_readwrite("t", &GridSpec::t)
        .def_readwrite("e", &GridSpec::e)
        .def_readwrite("x", &GridSpec::x)
        .def_readwrite("y", &GridSpec::y)
        .def("validate", &GridSpec::validate)
        .def("slice_size", &GridSpec::slice_size)
        .def("node_count", &GridSpec::node_count)
        .def("cell_volume", &GridSpec::cell_volume)
        .def("max_stable_dt", &GridSpec::max_stable_dt, py::arg("ou"), py::arg("p_max"));

    py::class_<GridField>(m, "GridField")
        .def(py::init<const GridSpec&>(), py::arg("grid"))
        .def_readonly("grid", &GridField::grid)
        .def_property_readonly("shape",
                               [](const GridField& f) {
                                   return py::make_tuple(f.grid.t.n, f.grid.e.n,
                                                         f.grid.x.n, f.grid.y.n);
                               })
        .def("at",
             [](const GridField& f, int it, int ie, int ix, int iy) {
                 return f.at(it, ie, ix, iy);
             },
             py::arg("it"), py::arg("ie"), py::arg("ix"), py::arg("iy"))
        .def("interp", &GridField::interp, py::arg("t"), py::arg("e"), py::arg("h"))
        .def("values", [](const GridField& f) { return f.data; });

    // Single-player solver.
    m.def(
        "solve_value",
        [](const GameParams& gp, const Efficiency& eff, const InterferencePath& path,
           const GridSpec& grid) { return solve_value(gp, eff, path, grid); },
        py::arg("gp"), py::arg("eff"), py::arg("interference"), py::arg("grid"));

    py::class_<FeedbackPolicy>(m, "FeedbackPolicy")
        .def("power", &FeedbackPolicy::power, py::arg("t"), py::arg("e"), py::arg("h"),
             py::arg("interference"))
        .def("power_at_node", &FeedbackPolicy::power_at_node, py::arg("it"),
             py::arg("ie"), py::arg("ix"), py::arg("iy"), py::arg("interference"))
        .def("power_grid", py::overload_cast<>(&FeedbackPolicy::power_grid, py::const_))
        .def("power_grid",
             py::overload_cast<const InterferencePath&>(&FeedbackPolicy::power_grid,
                                                        py::const_),
             py::arg("interference"))
        .def_property_readonly("v_e", [](const FeedbackPolicy& p) { return p.v_e(); });

    m.def("extract_policy", &extract_policy, py::arg("value"), py::arg("gp"),
          py::arg("eff"), py::arg("interference"));

    py::class_<OffProbabilityRow>(m, "OffProbabilityRow")
        .def_readonly("v_e", &OffProbabilityRow::v_e)
        .def_readonly("lower_bound", &OffProbabilityRow::lower_bound)
        .def_readonly("mc_estimate", &OffProbabilityRow::mc_estimate)
        .def_readonly("std_error", &OffProbabilityRow::std_error);

    m.def("off_probability", &off_probability, py::arg("eff"), py::arg("gp"),
          py::arg("v_e_grid"), py::arg("n_samples"), py::arg("seed"),
          py::call_guard<py::gil_scoped_release>());

    // Finite-population game.
    py::class_<Population>(m, "Population")
        .def_readwrite("states", &Population::states)
        .def_readwrite("streams", &Population::streams);

    m.def("common_population", &common_population, py::arg("k"), py::arg("e0"),
          py::arg("h0"));
    m.def("stationary_population", &stationary_population, py::arg("k"), py::arg("e0"),
          py::arg("ou"), py::arg("seed"));

    py::class_<TrajectorySlice>(m, "TrajectorySlice")
        .def_readonly("t", &TrajectorySlice::t)
        .def_readonly("energy", &TrajectorySlice::energy)
        .def_readonly("hx", &TrajectorySlice::hx)
        .def_readonly("hy", &TrajectorySlice::hy)
        .def_readonly("power", &TrajectorySlice::power)
        .def_readonly("interference", &TrajectorySlice::interference)
        .def_readonly("utility", &TrajectorySlice::utility);

    py::class_<Trajectory>(m, "Trajectory")
        .def_readonly("k", &Trajectory::k)
        .def_readonly("dt", &Trajectory::dt)
        .def_readonly("slices", &Trajectory::slices)
        .def_readonly("final_utility", &Trajectory::final_utility);

    m.def("simulate", &simulate, py::arg("policy"), py::arg("gp"), py::arg("eff"),
          py::arg("init"), py::arg("dt"), py::arg("seed"),
          py::arg("record_stride") = 1);

    py::class_<ConvergenceRow>(m, "ConvergenceRow")
        .def_readonly("k", &ConvergenceRow::k)
        .def_readonly("probe_t", &ConvergenceRow::probe_t)
        .def_readonly("mean_dev", &ConvergenceRow::mean_dev)
        .def_readonly("std_dev", &ConvergenceRow::std_dev);

    m.def("convergence_report", &convergence_report, py::arg("policy"), py::arg("gp"),
          py::arg("eff"), py::arg("k_list"), py::arg("replications"),
          py::arg("probe_times"), py::arg("i_hat"), py::arg("e0"), py::arg("dt"),
          py::arg("seed"));

    // Mean-field loop.
    py::class_<MfgConfig>(m, "MfgConfig")
        .def(py::init<>())
        .def_readwrite("damping", &MfgConfig::damping)
        .def_readwrite("tol", &MfgConfig::tol)
        .def_readwrite("max_iter", &MfgConfig::max_iter);

    py::class_<MfgSolution>(m, "MfgSolution")
        .def_readonly("value", &MfgSolution::value)
        .def_readonly("density", &MfgSolution::density)
        .def_readonly("powers", &MfgSolution::powers)
        .def_readonly("i_hat", &MfgSolution::i_hat)
        .def_readonly("residual_history", &MfgSolution::residual_history)
        .def_readonly("policy", &MfgSolution::policy)
        .def_readonly("iterations", &MfgSolution::iterations)
        .def_readonly("residual", &MfgSolution::residual)
        .def_readonly("converged", &MfgSolution::converged);

    py::class_<ConsistencyReport>(m, "ConsistencyReport")
        .def_readonly("sup_interference_dev", &ConsistencyReport::sup_interference_dev)
        .def_readonly("max_mass_error", &ConsistencyReport::max_mass_error)
        .def_readonly("max_value_residual", &ConsistencyReport::max_value_residual)
        .def_readonly("max_density_residual", &ConsistencyReport::max_density_residual);

    m.def("initial_density", &initial_density, py::arg("grid"), py::arg("ou"),
          py::arg("e0"));
    m.def("solve_fpk",
          py::overload_cast<const GridField&, const std::vector<double>&,
                            const OUParams&>(&solve_fpk),
          py::arg("alpha"), py::arg("m0"), py::arg("ou"),
          py::call_guard<py::gil_scoped_release>());
    m.def("mean_interference", &mean_interference, py::arg("m"), py::arg("alpha"));
    m.def("solve_mfg", &solve_mfg, py::arg("gp"), py::arg("eff"), py::arg("grid"),
          py::arg("m0"), py::arg("cfg") = MfgConfig{},
          py::call_guard<py::gil_scoped_release>());
    m.def("consistency_check", &consistency_check, py::arg("sol"), py::arg("m0"));

    // Run configuration (same schema the CLI reads).
    py::class_<RunConfig>(m, "RunConfig")
        .def(py::init<>())
        .def_readwrite("name", &RunConfig::name)
        .def_readwrite("game", &RunConfig::game)
        .def_readwrite("efficiency_family", &RunConfig::efficiency_family)
        .def_readwrite("efficiency_a", &RunConfig::efficiency_a)
        .def_readwrite("efficiency_m", &RunConfig::efficiency_m)
        .def_readwrite("grid_e_max", &RunConfig::grid_e_max)
        .def_readwrite("grid_n_e", &RunConfig::grid_n_e)
        .def_readwrite("grid_n_x", &RunConfig::grid_n_x)
        .def_readwrite("grid_n_y", &RunConfig::grid_n_y)
        .def_readwrite("grid_n_t", &RunConfig::grid_n_t)
        .def_readwrite("grid_width", &RunConfig::grid_width)
        .def_readwrite("solver", &RunConfig::solver)
        .def_readwrite("sim_dt", &RunConfig::sim_dt)
        .def_readwrite("sim_seed", &RunConfig::sim_seed)
        .def_readwrite("sim_n_paths", &RunConfig::sim_n_paths)
        .def_readwrite("sim_replications", &RunConfig::sim_replications)
        .def_readwrite("sim_e0", &RunConfig::sim_e0)
        .def_readwrite("sim_power", &RunConfig::sim_power)
        .def_readwrite("sim_policy", &RunConfig::sim_policy)
        .def_readwrite("sim_exact", &RunConfig::sim_exact)
        .def_readwrite("sim_record_stride", &RunConfig::sim_record_stride)
        .def_readwrite("sim_k_list", &RunConfig::sim_k_list)
        .def_readwrite("sim_probe_times", &RunConfig::sim_probe_times)
        .def_readwrite("sweep_v_e_max", &RunConfig::sweep_v_e_max)
        .def_readwrite("sweep_points", &RunConfig::sweep_points)
        .def_readwrite("sweep_samples", &RunConfig::sweep_samples)
        .def_readwrite("static_gains", &RunConfig::static_gains)
        .def_readwrite("out_dir", &RunConfig::out_dir);

    m.def("parse_config", &parse_config, py::arg("text"));
    m.def("load_config", &load_config, py::arg("path"));
    m.def("serialize", &serialize, py::arg("cfg"));
    m.def("validate", &validate, py::arg("cfg"));
    m.def("make_efficiency", &make_efficiency, py::arg("cfg"));
    m.def("make_grid", &make_grid, py::arg("cfg"));
    m.def("config_hash", &config_hash, py::arg("cfg"));
}
