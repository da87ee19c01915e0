#include "mrock/rock2.hpp"

#include <array>
#include <iomanip>
#include <istream>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace mrock {
namespace detail {
extern const char* const kRock2Asset;
}

namespace {

constexpr std::string_view kFormatTag = "rock2-coefficients v1";

std::vector<int> build_ladder() {
  std::vector<int> ladder;
  for (int s = kRock2MinDegree; s <= 20; ++s) ladder.push_back(s);
  int s = 20;
  while (s < kRock2MaxDegree) {
    s = std::max(s + 1, static_cast<int>(std::lround(s * 1.05)));
    ladder.push_back(std::min(s, kRock2MaxDegree));
  }
  return ladder;
}

const std::vector<Rock2Tableau>& builtin_table() {
  static const std::vector<Rock2Tableau> table = [] {
    std::istringstream in(detail::kRock2Asset);
    auto tabs = parse_rock2_table(in);
    const auto ladder = rock2_ladder();
    if (tabs.size() != ladder.size()) {
      throw std::runtime_error("rock2: embedded coefficient table does not cover the degree ladder; "
                               "regenerate data/rock2_coefficients.txt with rock2_coeffgen");
    }
    for (std::size_t k = 0; k < tabs.size(); ++k) {
      if (tabs[k].s != ladder[k]) throw std::runtime_error("rock2: coefficient table degrees out of order");
    }
    return tabs;
  }();
  return table;
}

}  // namespace

std::span<const int> rock2_ladder() {
  static const std::vector<int> ladder = build_ladder();
  return ladder;
}

const Rock2Tableau& rock2_tableau(int s_requested) {
  const auto& table = builtin_table();
  if (s_requested > table.back().s) {
    throw StageLimitError("rock2: " + std::to_string(s_requested) + " stages requested but the largest "
                          "available degree is " + std::to_string(table.back().s) + "; reduce the step size");
  }
  for (const auto& tab : table) {
    if (tab.s >= s_requested) return tab;
  }
  return table.back();  // unreachable
}

const Rock2Tableau& rock2_tableau_for_length(double length) {
  const auto& table = builtin_table();
  for (const auto& tab : table) {
    if (tab.ell >= length) return tab;
  }
  throw StageLimitError("rock2: stability interval of length " + std::to_string(length) +
                        " exceeds the largest available degree " + std::to_string(table.back().s) +
                        " (ell = " + std::to_string(table.back().ell) + "); reduce the step size");
}

std::vector<Rock2Tableau> parse_rock2_table(std::istream& in) {
  std::vector<Rock2Tableau> out;
  std::string line;
  bool have_tag = false;
  Rock2Tableau* cur = nullptr;
  int next_j = 0;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw std::runtime_error("rock2 table line " + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    if (!have_tag) {
      if (line != kFormatTag) fail("expected format tag '" + std::string(kFormatTag) + "'");
      have_tag = true;
      continue;
    }
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "degree") {
      if (cur && next_j != cur->s - 1) fail("incomplete record for degree " + std::to_string(cur->s));
      Rock2Tableau tab;
      if (!(ls >> tab.s >> tab.sigma1 >> tab.sigma2 >> tab.ell) || tab.s < kRock2MinDegree) fail("bad degree header");
      tab.mu = Vector::Zero(tab.s - 1);
      tab.nu = Vector::Zero(tab.s - 1);
      tab.kappa = Vector::Zero(tab.s - 1);
      out.push_back(std::move(tab));
      cur = &out.back();
      next_j = 1;
    } else {
      if (!cur) fail("coefficient row before any degree header");
      const int j = std::stoi(word);
      if (j != next_j || j > cur->s - 2) fail("unexpected stage index " + word);
      if (!(ls >> cur->mu[j] >> cur->nu[j] >> cur->kappa[j])) fail("bad coefficient row");
      ++next_j;
    }
  }
  if (cur && next_j != cur->s - 1) fail("incomplete record for degree " + std::to_string(cur->s));
  if (!have_tag && !out.empty()) fail("missing format tag");
  return out;
}

void write_rock2_table(std::ostream& out, std::span<const Rock2Tableau> tabs) {
  out << "# ROCK2 coefficient table.\n"
         "#\n"
         "# Each record starts with\n"
         "#   degree <s> <sigma1> <sigma2> <ell>\n"
         "# followed by s-2 rows\n"
         "#   <j> <mu_j> <nu_j> <kappa_j>\n"
         "# for j = 1..s-2 (nu_1 = kappa_1 = 0). Stages:\n"
         "#   k_1 = k_0 + tau mu_1 f(k_0)\n"
         "#   k_j = tau mu_j f(k_{j-1}) - nu_j k_{j-1} - kappa_j k_{j-2}\n"
         "#   finishing polynomial w(z) = 1 + 2 sigma1 z + sigma2 z^2\n"
         "# ell is the verified length of the stability interval [-ell, 0].\n"
         "# Generated by rock2_coeffgen; do not edit by hand.\n";
  out << kFormatTag << '\n';
  out << std::setprecision(17);
  for (const auto& tab : tabs) {
    out << "degree " << tab.s << ' ' << tab.sigma1 << ' ' << tab.sigma2 << ' ' << tab.ell << '\n';
    for (int j = 1; j <= tab.s - 2; ++j) {
      out << j << ' ' << tab.mu[j] << ' ' << tab.nu[j] << ' ' << tab.kappa[j] << '\n';
    }
  }
}

double scaled_rms_norm(const Vector& v, const Vector& y, const Vector& ynew, const Tolerance& tol) {
  if (v.size() == 0) return 0.0;
  const auto scale = tol.atol + tol.rtol * y.cwiseAbs().cwiseMax(ynew.cwiseAbs()).array();
  return std::sqrt((v.array() / scale).square().mean());
}

double rock2_stability(const Rock2Tableau& tab, double z) {
  double km2 = 1.0;
  double km1 = 1.0 + tab.mu[1] * z;
  for (int j = 2; j <= tab.s - 2; ++j) {
    const double k = tab.mu[j] * z * km1 - tab.nu[j] * km1 - tab.kappa[j] * km2;
    km2 = km1;
    km1 = k;
  }
  const double ksm1 = km1 + tab.sigma1 * z * km1;
  const double kstar = ksm1 + tab.sigma1 * z * ksm1;
  return kstar - tab.correction() * (z * ksm1 - z * km1);
}

}  // namespace mrock
