#include "r1mi/prior.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "json.hpp"

namespace r1mi {

Prior::Prior(std::vector<Atom> atoms) {
  if (atoms.empty()) throw std::invalid_argument("Prior: atom list is empty");
  for (const Atom& a : atoms) {
    if (!std::isfinite(a.value) || !std::isfinite(a.weight))
      throw std::invalid_argument("Prior: non-finite atom");
    if (a.weight < 0.0) throw std::invalid_argument("Prior: negative weight");
  }

  std::sort(atoms.begin(), atoms.end(),
            [](const Atom& a, const Atom& b) { return a.value < b.value; });

  // Merge duplicates, drop zero-weight atoms.
  std::vector<Atom> merged;
  for (const Atom& a : atoms) {
    if (!merged.empty() && merged.back().value == a.value)
      merged.back().weight += a.weight;
    else
      merged.push_back(a);
  }
  std::erase_if(merged, [](const Atom& a) { return a.weight == 0.0; });
  if (merged.empty()) throw std::invalid_argument("Prior: all weights are zero");

  double total = 0.0;
  for (const Atom& a : merged) total += a.weight;
  if (!(total > 0.0)) throw std::invalid_argument("Prior: weights sum to zero");
  for (Atom& a : merged) a.weight /= total;

  atoms_ = std::move(merged);
  for (const Atom& a : atoms_) {
    second_moment_ += a.weight * a.value * a.value;
    support_bound_ = std::max(support_bound_, std::abs(a.value));
  }
}

double Prior::moment(int k) const {
  if (k < 0) throw std::invalid_argument("Prior::moment: negative order");
  double acc = 0.0;
  for (const Atom& a : atoms_) acc += a.weight * std::pow(a.value, k);
  return acc;
}

std::string Prior::to_json() const {
  nlohmann::json j;
  j["atoms"] = nlohmann::json::array();
  for (const Atom& a : atoms_) j["atoms"].push_back({a.value, a.weight});
  return j.dump();
}

Prior Prior::from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("Prior::from_json: ") + e.what());
  }
  if (!j.contains("atoms") || !j["atoms"].is_array())
    throw std::invalid_argument("Prior::from_json: missing \"atoms\" array");
  std::vector<Atom> atoms;
  for (const auto& entry : j["atoms"]) {
    if (!entry.is_array() || entry.size() != 2)
      throw std::invalid_argument("Prior::from_json: atom must be [value, weight]");
    atoms.push_back({entry[0].get<double>(), entry[1].get<double>()});
  }
  return Prior(std::move(atoms));
}

Prior make_sparse_rademacher(double rho) {
  if (!(rho > 0.0) || rho > 1.0)
    throw std::invalid_argument("make_sparse_rademacher: rho must lie in (0, 1]");
  std::vector<Atom> atoms;
  if (rho < 1.0) atoms.push_back({0.0, 1.0 - rho});
  atoms.push_back({+1.0, rho / 2.0});
  atoms.push_back({-1.0, rho / 2.0});
  return Prior(std::move(atoms));
}

}  // namespace r1mi
