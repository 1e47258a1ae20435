// relucost: command-line driver for the representation-cost library.
//
// Exit codes: 0 success, 1 usage error, 2 invalid input or failed oracle
// check, 3 numerical divergence.

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "relucost/dataset.hpp"
#include "relucost/deep_parallel.hpp"
#include "relucost/end_slope_oracle.hpp"
#include "relucost/highdim.hpp"
#include "relucost/json_io.hpp"
#include "relucost/net2.hpp"
#include "relucost/repcost.hpp"
#include "relucost/rng.hpp"
#include "relucost/spline_fit.hpp"

namespace {

using namespace relucost;

constexpr int kExitUsage = 1;
constexpr int kExitInvalid = 2;
constexpr int kExitDiverged = 3;

// Raised when a computed result fails its built-in cross-check.
class OracleMismatch : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Globals {
  std::uint64_t seed = 0;
  std::string output;
  std::string format;  // empty: the command's default

  bool Csv(bool csv_by_default = false) const {
    return format.empty() ? csv_by_default : format == "csv";
  }
};

void Emit(const Globals& g, const std::string& text) {
  if (g.output.empty() || g.output == "-") {
    std::cout << text;
    if (!text.empty() && text.back() != '\n') std::cout << '\n';
    return;
  }
  std::ofstream out(g.output);
  if (!out) throw std::invalid_argument("cannot write " + g.output);
  out << text;
  if (!text.empty() && text.back() != '\n') out << '\n';
}

std::string Num(double v) {
  std::ostringstream s;
  s.precision(17);
  s << v;
  return s.str();
}

void WriteFile(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::invalid_argument("cannot write " + path);
  out << text;
}

// ---- repcost --------------------------------------------------------------

struct RepcostArgs {
  std::string input;
};

void RunRepcost(const Globals& g, const RepcostArgs& a) {
  const PwlFunction f = PwlFromJson(ReadJsonFile(a.input));
  const CostReport r = RepresentationCost(f);
  if (g.Csv()) {
    Emit(g, "tv,end_sum,cost,case,upper_bound\n" + Num(r.tv) + "," +
                Num(r.end_sum) + "," + Num(r.cost) + "," +
                std::string(ToString(r.lagrange_case)) + "," + Num(r.upper_bound));
    return;
  }
  Emit(g, CostReportToJson(r).dump(2));
}

// ---- interp ---------------------------------------------------------------

struct InterpArgs {
  std::string input;
  bool grid_oracle = false;
  int grid = 512;
  double margin = 1.0;
};

void RunInterp(const Globals& g, const InterpArgs& a) {
  const Dataset data = DatasetFromJson(ReadJsonFile(a.input));
  const InterpolationResult result = MinNormInterpolant(data);
  const double lo = data.empty() ? -1.0 : data[0].x - a.margin;
  const double hi = data.empty() ? 1.0 : data[data.size() - 1].x + a.margin;

  Json out = InterpolationToJson(result, a.grid, lo, hi);
  bool agree = true;
  if (a.grid_oracle && data.size() >= 2) {
    const std::vector<double> interior = InteriorSlopes(data);
    const EndSlopes grid = GridSearchEndSlopes(interior);
    const double gap = std::abs(grid.value - result.cost);
    agree = gap <= 1e-9;
    out["grid_oracle"] = {{"cost", grid.value},
                          {"end_slopes", Json::array({grid.left, grid.right})},
                          {"abs_difference", gap},
                          {"agree", agree}};
  }
  if (g.Csv()) {
    std::string csv = "x,f\n";
    for (const Json& row : out["trace"]) {
      csv += Num(row[0].get<double>()) + "," + Num(row[1].get<double>()) + "\n";
    }
    Emit(g, csv);
  } else {
    Emit(g, out.dump(2));
  }
  if (!agree) throw OracleMismatch("interp: solver and grid oracle disagree beyond 1e-9");
}

// ---- train2 ---------------------------------------------------------------

struct Train2Args {
  std::string input;
  std::size_t random_points = 0;
  double x_half = 1.0;
  double y_half = 1.0;
  std::size_t k = 20;
  double lambda = 1e-5;
  std::int64_t steps = 100000;
  double lr = 1e-2;
  double init_scale = 1.0;
  std::int64_t trace_every = 1000;
  std::string trace_csv;
  std::string samples_csv;
  int sample_points = 512;
};

void RunTrain2(const Globals& g, const Train2Args& a) {
  Dataset data;
  if (!a.input.empty()) {
    data = DatasetFromJson(ReadJsonFile(a.input));
  } else if (a.random_points > 0) {
    CounterRng rng = CounterRng(g.seed).Split(1);
    data = RandomJitteredDataset(a.random_points, a.x_half, a.y_half, rng);
  } else {
    throw CLI::ValidationError("train2", "give a dataset file or --random-points");
  }

  TrainConfig cfg;
  cfg.lambda = a.lambda;
  cfg.learning_rate = a.lr;
  cfg.max_steps = a.steps;
  cfg.seed = g.seed;
  cfg.init_scale = a.init_scale;
  cfg.trace_every = a.trace_every;
  const TrainResult trained = Train(InitNet(a.k, cfg), data, cfg);

  const PwlFunction learned = ToPwl(trained.net);
  const double rbar = RepresentationCost(learned).cost;
  const double c = NetCost(trained.net);
  const InterpolationResult spline = MinNormInterpolant(data);

  if (!a.trace_csv.empty()) {
    std::string csv = "step,objective,loss,cost\n";
    for (const TraceRow& r : trained.trace) {
      csv += std::to_string(r.step) + "," + Num(r.objective) + "," + Num(r.loss) +
             "," + Num(r.cost) + "\n";
    }
    WriteFile(a.trace_csv, csv);
  }
  if (!a.samples_csv.empty() && !data.empty()) {
    const double span = data[data.size() - 1].x - data[0].x;
    const double lo = data[0].x - 0.25 * span;
    const double hi = data[data.size() - 1].x + 0.25 * span;
    std::string csv = "x,network,spline\n";
    for (int i = 0; i < a.sample_points; ++i) {
      const double x = lo + (hi - lo) * i / std::max(1, a.sample_points - 1);
      csv += Num(x) + "," + Num(NetEval(trained.net, x)) + "," + Num(spline.spline(x)) + "\n";
    }
    WriteFile(a.samples_csv, csv);
  }

  const double loss = trained.trace.empty() ? 0.0 : trained.trace.back().loss;
  if (g.Csv()) {
    Emit(g, "units,steps,loss,net_cost,rbar,spline_optimum,rbar_over_optimum,cost_over_rbar\n" +
                std::to_string(a.k) + "," + std::to_string(trained.steps) + "," +
                Num(loss) + "," + Num(c) + "," + Num(rbar) + "," + Num(spline.cost) +
                "," + Num(rbar / spline.cost) + "," + Num(c / rbar));
    return;
  }
  Json out{{"net", NetToJson(trained.net)},
           {"dataset", DatasetToJson(data)},
           {"steps", trained.steps},
           {"final_loss", loss},
           {"final_grad_norm", trained.final_grad_norm},
           {"net_cost", c},
           {"rbar", rbar},
           {"spline_optimum", spline.cost},
           {"rbar_over_optimum", rbar / spline.cost},
           {"cost_over_rbar", c / rbar}};
  Emit(g, out.dump(2));
}

// ---- extract --------------------------------------------------------------

struct ExtractArgs {
  std::string input;
};

void RunExtract(const Globals& g, const ExtractArgs& a) {
  const AtomList1D atoms = ExtractU(NetFromJson(ReadJsonFile(a.input)));
  if (g.Csv()) {
    std::string csv = "location,mass\n";
    for (const Atom& at : atoms.atoms) csv += Num(at.location) + "," + Num(at.mass) + "\n";
    Emit(g, csv);
    return;
  }
  Emit(g, AtomListToJson(atoms).dump(2));
}

// ---- depth ----------------------------------------------------------------

struct DepthArgs {
  std::string input;
  std::vector<int> random;  // L m k d
  bool emit_nets = false;
};

void RunDepth(const Globals& g, const DepthArgs& a) {
  ParallelDeepNet net;
  if (!a.input.empty()) {
    net = ParallelNetFromJson(ReadJsonFile(a.input));
  } else if (a.random.size() == 4) {
    CounterRng rng = CounterRng(g.seed).Split(2);
    net = RandomParallelNet(a.random[0], a.random[1], a.random[3], a.random[2], rng);
  } else {
    throw CLI::ValidationError("depth", "give a net file or --random L m k d");
  }
  net.Validate();

  const SphereFactoredNet sphere = AlignToSphere(net);
  const ParallelDeepNet rebuilt = FromAlpha(sphere);
  const AlignmentReport before = CheckAlignment(net);
  const AlignmentReport after = CheckAlignment(rebuilt);
  const double bridge = BridgePenalty(sphere.alpha, net.depth);
  const double cost = CostCL(net);
  const double rebuilt_cost = CostCL(rebuilt);

  if (g.Csv()) {
    std::string csv = "subnet,alpha,deviation\n";
    for (std::size_t i = 0; i < sphere.subnets.size(); ++i) {
      csv += std::to_string(i) + "," + Num(sphere.alpha(static_cast<Eigen::Index>(i))) +
             "," + Num(after.deviation[i]) + "\n";
    }
    Emit(g, csv);
  } else {
    std::vector<double> alpha(sphere.alpha.data(), sphere.alpha.data() + sphere.alpha.size());
    Json out{{"L", net.depth},
             {"subnets", net.subnet_count()},
             {"cost_CL", cost},
             {"bridge_penalty", bridge},
             {"rebuilt_cost_CL", rebuilt_cost},
             {"alpha", alpha},
             {"aligned", before.aligned},
             {"max_deviation", before.max_deviation},
             {"rebuilt_max_deviation", after.max_deviation}};
    if (a.emit_nets) {
      out["input_net"] = ParallelNetToJson(net);
      out["rebuilt_net"] = ParallelNetToJson(rebuilt);
    }
    Emit(g, out.dump(2));
  }
  if (std::abs(rebuilt_cost - bridge) > 1e-10 * (1.0 + bridge) ||
      rebuilt_cost > cost + 1e-10 * (1.0 + cost)) {
    throw OracleMismatch("depth: rescaling identity violated");
  }
}

// ---- highdim --------------------------------------------------------------

struct HighdimArgs {
  std::string claim;
  int d = 2;
  std::vector<double> radii{10.0, 100.0, 1000.0};
  std::int64_t samples = 100000;
  int atoms = 5;
  double total_mass = 2.0;
  double fd_step = 1e-2;
  int quadrature_n = 64;
};

AtomMeasureDD RandomNonnegativeMeasure(int d, int count, double total,
                                       CounterRng& rng) {
  AtomMeasureDD m;
  m.dim = d;
  std::vector<double> weights;
  double sum = 0.0;
  for (int i = 0; i < count; ++i) {
    weights.push_back(rng.Uniform(0.5, 1.5));
    sum += weights.back();
  }
  for (int i = 0; i < count; ++i) {
    Eigen::VectorXd w(d);
    for (int j = 0; j < d; ++j) w(j) = rng.Normal();
    w.normalize();
    m.atoms.push_back({w, rng.Uniform(-1.0, 1.0), total * weights[i] / sum});
  }
  return m;
}

void RunHighdim(const Globals& g, const HighdimArgs& a) {
  std::string csv = "r,estimate,std_error\n";
  Json rows = Json::array();
  auto add = [&](double r, const MonteCarloEstimate& e) {
    csv += Num(r) + "," + Num(e.estimate) + "," + Num(e.std_error) + "\n";
    rows.push_back({{"r", r}, {"estimate", e.estimate}, {"std_error", e.std_error}});
  };
  if (a.claim == "laplacian") {
    CounterRng rng = CounterRng(g.seed).Split(3);
    const AtomMeasureDD measure = RandomNonnegativeMeasure(a.d, a.atoms, a.total_mass, rng);
    for (double r : a.radii) add(r, LaplacianFluxEstimate(measure, r, a.samples, g.seed));
  } else {
    for (double r : a.radii) {
      add(r, HessianDecayEstimate(a.d, r, a.samples, a.fd_step, g.seed, a.quadrature_n));
    }
  }
  if (g.Csv(/*csv_by_default=*/true)) {
    Emit(g, csv);
  } else {
    Emit(g, Json{{"claim", a.claim}, {"d", a.d}, {"sweep", rows}}.dump(2));
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Representation cost of infinite-width ReLU networks"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice")->capture_default_str();
  app.add_option("-o,--output", g.output, "Output path (default: stdout)");
  app.add_option("--format", g.format,
                 "Output format: json or csv (default csv for highdim, json otherwise)")
      ->check(CLI::IsMember({"json", "csv"}));

  RepcostArgs repcost;
  auto* c_repcost = app.add_subcommand("repcost", "Representation cost of a piecewise-linear function");
  c_repcost->add_option("pwl", repcost.input, "PWL JSON file")->required();

  InterpArgs interp;
  auto* c_interp = app.add_subcommand("interp", "Minimum-cost interpolant of a dataset");
  c_interp->add_option("dataset", interp.input, "Dataset JSON file")->required();
  c_interp->add_flag("--grid-oracle", interp.grid_oracle,
                     "Cross-check the end slopes against a brute-force grid search");
  c_interp->add_option("--grid", interp.grid, "Trace sample count")
      ->check(CLI::PositiveNumber)->capture_default_str();
  c_interp->add_option("--margin", interp.margin, "Trace extends this far past the data")
      ->capture_default_str();

  Train2Args train;
  auto* c_train = app.add_subcommand("train2", "Train a two-layer network with weight decay");
  c_train->add_option("dataset", train.input, "Dataset JSON file");
  c_train->add_option("--random-points", train.random_points,
                      "Use a seeded random dataset of this size instead of a file");
  c_train->add_option("--x-half", train.x_half, "Random dataset x range half-width")
      ->capture_default_str();
  c_train->add_option("--y-half", train.y_half, "Random dataset y range half-width")
      ->capture_default_str();
  c_train->add_option("--k", train.k, "Hidden units")->capture_default_str();
  c_train->add_option("--lambda", train.lambda, "Weight decay")->capture_default_str();
  c_train->add_option("--steps", train.steps, "Gradient steps")->capture_default_str();
  c_train->add_option("--lr", train.lr, "Learning rate")->capture_default_str();
  c_train->add_option("--init-scale", train.init_scale, "Uniform init half-width")
      ->capture_default_str();
  c_train->add_option("--trace-every", train.trace_every, "Trace period")
      ->capture_default_str();
  c_train->add_option("--trace-csv", train.trace_csv, "Write step,objective,loss,cost here");
  c_train->add_option("--samples-csv", train.samples_csv,
                      "Write the network and spline sampled on a grid here");
  c_train->add_option("--sample-points", train.sample_points, "Grid size for --samples-csv")
      ->capture_default_str();

  ExtractArgs extract;
  auto* c_extract = app.add_subcommand("extract", "Second-derivative atoms of a network");
  c_extract->add_option("net", extract.input, "Network JSON file")->required();

  DepthArgs depth;
  auto* c_depth = app.add_subcommand("depth", "Alignment and bridge-penalty report for a parallel net");
  c_depth->add_option("net", depth.input, "Parallel net JSON file");
  c_depth->add_option("--random", depth.random, "Random net with shape L m k d")
      ->expected(4);
  c_depth->add_flag("--emit-nets", depth.emit_nets, "Include input and rebuilt nets");

  HighdimArgs high;
  auto* c_high = app.add_subcommand("highdim", "Monte Carlo sweeps for the d-dimensional identities");
  c_high->add_option("--claim", high.claim, "laplacian or bump-decay")
      ->required()
      ->check(CLI::IsMember({"laplacian", "bump-decay"}));
  c_high->add_option("--d", high.d, "Dimension")->check(CLI::Range(2, 64))->capture_default_str();
  c_high->add_option("--r-sweep", high.radii, "Radii")->delimiter(',')->capture_default_str();
  c_high->add_option("--samples", high.samples, "Monte Carlo samples per radius")
      ->capture_default_str();
  c_high->add_option("--atoms", high.atoms, "Atom count (laplacian)")->capture_default_str();
  c_high->add_option("--mass", high.total_mass, "Total atom mass (laplacian)")
      ->capture_default_str();
  c_high->add_option("--fd-step", high.fd_step, "Finite-difference step (bump-decay)")
      ->capture_default_str();
  c_high->add_option("--quadrature-n", high.quadrature_n, "Quadrature nodes (bump-decay)")
      ->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*c_repcost) RunRepcost(g, repcost);
    if (*c_interp) RunInterp(g, interp);
    if (*c_train) RunTrain2(g, train);
    if (*c_extract) RunExtract(g, extract);
    if (*c_depth) RunDepth(g, depth);
    if (*c_high) RunHighdim(g, high);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const DivergenceError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDiverged;
  } catch (const OracleMismatch& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvalid;
  }
  return 0;
}
