#include "relucost/json_io.hpp"

#include <fstream>
#include <stdexcept>

namespace relucost {
namespace {

[[noreturn]] void Malformed(const std::string& what) {
  throw std::invalid_argument("malformed JSON: " + what);
}

const Json& Field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) Malformed(std::string("missing \"") + key + "\"");
  return j.at(key);
}

double Number(const Json& j, const char* what) {
  if (!j.is_number()) Malformed(std::string(what) + " must be a number");
  return j.get<double>();
}

std::vector<double> NumberArray(const Json& j, const char* what) {
  if (!j.is_array()) Malformed(std::string(what) + " must be an array");
  std::vector<double> out;
  out.reserve(j.size());
  for (const Json& v : j) out.push_back(Number(v, what));
  return out;
}

Json MatrixToJson(const Eigen::MatrixXd& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

Eigen::MatrixXd MatrixFromJson(const Json& j) {
  if (!j.is_array() || j.empty()) Malformed("layer must be a non-empty array of rows");
  const std::size_t cols = j.front().is_array() ? j.front().size() : 0;
  Eigen::MatrixXd m(static_cast<Eigen::Index>(j.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t r = 0; r < j.size(); ++r) {
    const std::vector<double> row = NumberArray(j[r], "layer row");
    if (row.size() != cols) Malformed("ragged layer");
    for (std::size_t c = 0; c < cols; ++c) {
      m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = row[c];
    }
  }
  return m;
}

}  // namespace

Json PwlToJson(const PwlFunction& f) {
  const auto [ax, ay] = f.anchor();
  return Json{{"breakpoints", f.breakpoints()},
              {"slopes", f.slopes()},
              {"anchor", Json::array({ax, ay})}};
}

PwlFunction PwlFromJson(const Json& j) {
  std::vector<double> bps = NumberArray(Field(j, "breakpoints"), "breakpoints");
  std::vector<double> slopes = NumberArray(Field(j, "slopes"), "slopes");
  const std::vector<double> anchor = NumberArray(Field(j, "anchor"), "anchor");
  if (anchor.size() != 2) Malformed("anchor must be [x, y]");
  return PwlFunction(std::move(bps), std::move(slopes), anchor[0], anchor[1]);
}

Json MeasureToJson(const ThresholdMeasure1D& measure) {
  Json atoms = Json::array();
  for (const ThresholdAtom& a : measure.atoms) {
    atoms.push_back({{"w", a.direction}, {"b", a.threshold}, {"mass", a.mass}});
  }
  return Json{{"atoms", std::move(atoms)}, {"c", measure.offset}};
}

ThresholdMeasure1D MeasureFromJson(const Json& j) {
  ThresholdMeasure1D m;
  const Json& atoms = Field(j, "atoms");
  if (!atoms.is_array()) Malformed("atoms must be an array");
  for (const Json& a : atoms) {
    const double w = Number(Field(a, "w"), "w");
    if (w != 1.0 && w != -1.0) Malformed("w must be 1 or -1");
    m.atoms.push_back({static_cast<int>(w), Number(Field(a, "b"), "b"),
                       Number(Field(a, "mass"), "mass")});
  }
  m.offset = j.contains("c") ? Number(j.at("c"), "c") : 0.0;
  return m;
}

Json NetToJson(const TwoLayerNet& net) {
  return Json{{"w1", net.w1}, {"b1", net.b1}, {"w2", net.w2}, {"b2", net.b2}};
}

TwoLayerNet NetFromJson(const Json& j) {
  TwoLayerNet net;
  net.w1 = NumberArray(Field(j, "w1"), "w1");
  net.b1 = NumberArray(Field(j, "b1"), "b1");
  net.w2 = NumberArray(Field(j, "w2"), "w2");
  net.b2 = j.contains("b2") ? Number(j.at("b2"), "b2") : 0.0;
  net.Validate();
  return net;
}

Json DatasetToJson(const Dataset& data) {
  Json points = Json::array();
  for (const DataPoint& p : data.points()) points.push_back(Json::array({p.x, p.y}));
  return Json{{"points", std::move(points)}};
}

Dataset DatasetFromJson(const Json& j) {
  const Json& points = Field(j, "points");
  if (!points.is_array()) Malformed("points must be an array");
  std::vector<DataPoint> out;
  for (const Json& p : points) {
    const std::vector<double> xy = NumberArray(p, "point");
    if (xy.size() != 2) Malformed("point must be [x, y]");
    out.push_back({xy[0], xy[1]});
  }
  return Dataset(std::move(out));
}

Json AtomListToJson(const AtomList1D& atoms) {
  Json out = Json::array();
  for (const Atom& a : atoms.atoms) {
    out.push_back({{"location", a.location}, {"mass", a.mass}});
  }
  return Json{{"atoms", std::move(out)}};
}

Json CostReportToJson(const CostReport& report) {
  return Json{{"tv", report.tv},
              {"end_sum", report.end_sum},
              {"cost", report.cost},
              {"case", std::string(ToString(report.lagrange_case))},
              {"upper_bound", report.upper_bound}};
}

Json InterpolationToJson(const InterpolationResult& result, int grid_points,
                         double lo, double hi) {
  Json trace = Json::array();
  for (int i = 0; i < grid_points; ++i) {
    const double x =
        grid_points == 1 ? lo : lo + (hi - lo) * i / static_cast<double>(grid_points - 1);
    trace.push_back(Json::array({x, result.spline(x)}));
  }
  return Json{{"spline", PwlToJson(result.spline)},
              {"cost", result.cost},
              {"end_slopes", Json::array({result.left_end_slope, result.right_end_slope})},
              {"trace", std::move(trace)}};
}

Json ParallelNetToJson(const ParallelDeepNet& net) {
  Json subnets = Json::array();
  for (const SubnetLayers& layers : net.subnets) {
    Json s = Json::array();
    for (const Eigen::MatrixXd& w : layers) s.push_back(MatrixToJson(w));
    subnets.push_back(std::move(s));
  }
  std::vector<double> top(net.top.data(), net.top.data() + net.top.size());
  return Json{{"L", net.depth},
              {"m", net.width},
              {"d", net.input_dim},
              {"top", top},
              {"subnets", std::move(subnets)}};
}

ParallelDeepNet ParallelNetFromJson(const Json& j) {
  ParallelDeepNet net;
  net.depth = static_cast<int>(Number(Field(j, "L"), "L"));
  net.width = static_cast<int>(Number(Field(j, "m"), "m"));
  net.input_dim = static_cast<int>(Number(Field(j, "d"), "d"));
  const std::vector<double> top = NumberArray(Field(j, "top"), "top");
  net.top = Eigen::Map<const Eigen::VectorXd>(top.data(), static_cast<Eigen::Index>(top.size()));
  const Json& subnets = Field(j, "subnets");
  if (!subnets.is_array()) Malformed("subnets must be an array");
  for (const Json& s : subnets) {
    if (!s.is_array()) Malformed("subnet must be an array of layers");
    SubnetLayers layers;
    for (const Json& w : s) layers.push_back(MatrixFromJson(w));
    net.subnets.push_back(std::move(layers));
  }
  net.Validate();
  return net;
}

Json ReadJsonFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

}  // namespace relucost
