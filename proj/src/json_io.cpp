#include "ncconv/json_io.hpp"

#include <json.hpp>

namespace ncconv {

namespace {

using nlohmann::json;

Domain domain_from_name(const std::string& name) {
  if (name == "real") return Domain::RealLine;
  if (name == "positive") return Domain::PositiveHalfLine;
  if (name == "circle") return Domain::UnitCircle;
  throw DomainError("unknown domain '" + name + "'");
}

json atoms_to_json(const std::vector<Atom>& atoms) {
  json arr = json::array();
  for (const auto& a : atoms) arr.push_back({{"x", a.position}, {"w", a.weight}});
  return arr;
}

std::vector<Atom> atoms_from_json(const json& arr) {
  std::vector<Atom> atoms;
  for (const auto& item : arr)
    atoms.push_back({item.at("x").get<double>(), item.at("w").get<double>()});
  return atoms;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j)
      row.push_back({m(i, j).real(), m(i, j).imag()});
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string measure_to_json(const Measure& mu) {
  json out;
  out["domain"] = domain_name(domain_of(mu));
  if (const auto* a = std::get_if<AtomicMeasure>(&mu)) {
    out["atoms"] = atoms_to_json(a->atoms());
  } else {
    const auto& d = std::get<DensityMeasure>(mu);
    out["grid"] = d.grid();
    out["density"] = d.density();
    out["atoms"] = atoms_to_json(d.atom_part());
  }
  return out.dump();
}

Measure measure_from_json(const std::string& text) {
  json in = json::parse(text);
  const Domain domain = domain_from_name(in.at("domain").get<std::string>());
  if (!in.contains("grid")) {
    return make_atomic(domain, atoms_from_json(in.at("atoms")));
  }
  std::vector<Atom> atoms;
  if (in.contains("atoms")) atoms = atoms_from_json(in["atoms"]);
  return DensityMeasure(domain, in.at("grid").get<std::vector<double>>(),
                        in.at("density").get<std::vector<double>>(),
                        std::move(atoms));
}

std::string atom_part_to_json(Domain domain, const std::vector<Atom>& atoms) {
  json out;
  out["domain"] = domain_name(domain);
  out["atoms"] = atoms_to_json(atoms);
  return out.dump();
}

std::string model_to_json(const OperatorModel& model) {
  json out;
  out["kind"] = model_kind_name(model.kind);
  out["dim"] = model.dim();
  out["X"] = matrix_to_json(model.X);
  out["Y"] = matrix_to_json(model.Y);
  json omega = json::array();
  for (Eigen::Index i = 0; i < model.omega.size(); ++i)
    omega.push_back({model.omega[i].real(), model.omega[i].imag()});
  out["omega"] = std::move(omega);
  return out.dump();
}

}  // namespace ncconv
