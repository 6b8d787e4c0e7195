// Aggregation of per-run payoffs into ability scores (mean score overall,
// and mean score per role), repeat-stability tracking, and report tables.
#pragma once

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "arena/util.hpp"

namespace arena {

// V = (v_ij): agent i's payoff in repeat j. Cells are optional because a
// pairwise round-robin seats only a subset of the roster per run; aborted
// runs never become columns at all.
struct PayoffMatrix {
    std::vector<std::string> agent_ids;                       // de-anonymized, reporting only
    std::vector<std::vector<std::optional<double>>> values;   // N x M

    std::size_t agents() const { return agent_ids.size(); }
    std::size_t repeats() const { return values.empty() ? 0 : values[0].size(); }

    void validate() const {
        if (agent_ids.size() != values.size())
            throw ContractError("payoff matrix: row count != agent count");
        for (const auto& row : values)
            if (row.size() != repeats()) throw ContractError("payoff matrix: ragged rows");
    }
};

// S = (s_ij): agent i's role in repeat j, values in {1..L}.
struct RoleAssignment {
    std::vector<std::vector<std::optional<int>>> values;

    void validate_against(const PayoffMatrix& v, int role_count) const {
        if (values.size() != v.values.size())
            throw ContractError("role assignment: shape mismatch with payoff matrix");
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (values[i].size() != v.repeats())
                throw ContractError("role assignment: shape mismatch with payoff matrix");
            for (std::size_t j = 0; j < values[i].size(); ++j) {
                if (values[i][j].has_value() != v.values[i][j].has_value())
                    throw ContractError("role assignment: defined cells differ from payoffs");
                if (values[i][j] && (*values[i][j] < 1 || *values[i][j] > role_count))
                    throw ContractError("role assignment: role index out of range");
            }
        }
    }
};

// Θ: a vector for symmetric tasks, an N x L matrix for asymmetric ones.
// Cells with zero samples stay unset rather than zero-filled.
struct AbilityCell {
    std::optional<double> theta;
    int samples = 0;
};

struct AbilityResult {
    std::vector<std::string> agent_ids;
    std::vector<std::string> role_names;                 // size L (1 for symmetric)
    std::vector<std::vector<AbilityCell>> cells;         // N x L
};

// Mean score per agent over all valid repeats.
inline AbilityResult symmetric_score(const PayoffMatrix& v) {
    v.validate();
    if (v.agents() == 0 || v.repeats() == 0)
        throw ContractError("symmetric_score: empty payoff matrix");
    AbilityResult out;
    out.agent_ids = v.agent_ids;
    out.role_names = {"all"};
    for (std::size_t i = 0; i < v.agents(); ++i) {
        double sum = 0;
        int n = 0;
        for (const auto& cell : v.values[i])
            if (cell) {
                sum += *cell;
                ++n;
            }
        AbilityCell cell;
        cell.samples = n;
        if (n > 0) cell.theta = sum / n;
        out.cells.push_back({cell});
    }
    return out;
}

// Mean score per agent per role: θ_il averages v_ij over repeats where
// agent i held role l.
inline AbilityResult asymmetric_score(const PayoffMatrix& v, const RoleAssignment& s,
                                      const std::vector<std::string>& role_names) {
    v.validate();
    const int role_count = static_cast<int>(role_names.size());
    s.validate_against(v, role_count);
    AbilityResult out;
    out.agent_ids = v.agent_ids;
    out.role_names = role_names;
    for (std::size_t i = 0; i < v.agents(); ++i) {
        std::vector<AbilityCell> row(role_names.size());
        for (std::size_t j = 0; j < v.repeats(); ++j) {
            if (!v.values[i][j]) continue;
            auto& cell = row[static_cast<std::size_t>(*s.values[i][j] - 1)];
            cell.theta = cell.theta.value_or(0.0) + *v.values[i][j];
            ++cell.samples;
        }
        for (auto& cell : row)
            if (cell.samples > 0) cell.theta = *cell.theta / cell.samples;
        out.cells.push_back(std::move(row));
    }
    return out;
}

// Running means per agent after each completed repeat.
struct StabilityTrace {
    std::vector<std::string> agent_ids;
    std::vector<std::vector<double>> running_means;  // N x repeats-so-far

    static StabilityTrace from_matrix(const PayoffMatrix& v) {
        StabilityTrace trace;
        trace.agent_ids = v.agent_ids;
        for (std::size_t i = 0; i < v.agents(); ++i) {
            std::vector<double> means;
            double sum = 0;
            int n = 0;
            for (const auto& cell : v.values[i]) {
                if (cell) {
                    sum += *cell;
                    ++n;
                }
                if (n > 0) means.push_back(sum / n);
            }
            trace.running_means.push_back(std::move(means));
        }
        return trace;
    }
};

struct StabilityReport {
    bool sufficient = false;  // needs >= 2 repeats
    bool converged = false;   // advisory only
    double max_delta = 0.0;   // max |running-mean delta| over the window
    int window = 3;
    double epsilon = 0.0;
};

// Advisory convergence check on running-mean deltas over the last window.
inline StabilityReport stability_check(const StabilityTrace& trace, double epsilon,
                                       int window = 3) {
    StabilityReport report;
    report.epsilon = epsilon;
    report.window = window;
    std::size_t repeats = 0;
    for (const auto& means : trace.running_means) repeats = std::max(repeats, means.size());
    if (repeats < 2) return report;  // insufficient repeats
    report.sufficient = true;
    for (const auto& means : trace.running_means) {
        std::size_t first = means.size() > static_cast<std::size_t>(window)
                                ? means.size() - static_cast<std::size_t>(window)
                                : 1;
        for (std::size_t k = first; k < means.size(); ++k)
            report.max_delta = std::max(report.max_delta, std::abs(means[k] - means[k - 1]));
    }
    report.converged = report.max_delta < epsilon;
    return report;
}

// --- Reporting -----------------------------------------------------------

// One pairwise match: two seated agents with their roles and payoffs.
// Feeds the role-split tables with marginal means.
struct MatchRecord {
    std::string row_agent;     // role-1 side (early / programmer / translator)
    std::string col_agent;     // role-2 side
    double row_payoff = 0.0;
    double col_payoff = 0.0;
};

struct FiveNumberSummary {
    double min = 0, q1 = 0, median = 0, q3 = 0, max = 0;
    int samples = 0;
};

inline FiveNumberSummary five_number_summary(std::vector<double> values) {
    FiveNumberSummary s;
    if (values.empty()) return s;
    std::sort(values.begin(), values.end());
    s.samples = static_cast<int>(values.size());
    auto quantile = [&](double q) {
        double idx = q * (values.size() - 1);
        std::size_t lo = static_cast<std::size_t>(idx);
        std::size_t hi = std::min(lo + 1, values.size() - 1);
        double frac = idx - static_cast<double>(lo);
        return values[lo] * (1 - frac) + values[hi] * frac;
    };
    s.min = values.front();
    s.q1 = quantile(0.25);
    s.median = quantile(0.5);
    s.q3 = quantile(0.75);
    s.max = values.back();
    return s;
}

// Pairwise role-split table: cell (r, c) holds the mean role-1 and role-2
// scores of matches where agent r held role 1 against agent c; diagonal
// cells stay empty and render as dashes. Marginals are per-agent means of
// their role-1 (row) and role-2 (column) scores.
struct PairwiseTable {
    std::vector<std::string> agents;
    std::string role1_label, role2_label;
    // cell[r][c] = {mean role1 score, mean role2 score, samples}
    struct Cell {
        std::optional<double> role1_mean, role2_mean;
        int samples = 0;
    };
    std::vector<std::vector<Cell>> cells;
    std::vector<std::optional<double>> row_marginal;  // mean role-1 score per row agent
    std::vector<std::optional<double>> col_marginal;  // mean role-2 score per column agent
};

inline PairwiseTable build_pairwise_table(const std::vector<std::string>& agents,
                                          const std::vector<MatchRecord>& matches,
                                          const std::string& role1_label,
                                          const std::string& role2_label) {
    PairwiseTable table;
    table.agents = agents;
    table.role1_label = role1_label;
    table.role2_label = role2_label;
    const std::size_t n = agents.size();
    table.cells.assign(n, std::vector<PairwiseTable::Cell>(n));
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i) index[agents[i]] = i;

    std::vector<std::vector<double>> sums1(n, std::vector<double>(n, 0.0));
    std::vector<std::vector<double>> sums2(n, std::vector<double>(n, 0.0));
    for (const auto& m : matches) {
        auto r = index.at(m.row_agent), c = index.at(m.col_agent);
        sums1[r][c] += m.row_payoff;
        sums2[r][c] += m.col_payoff;
        ++table.cells[r][c].samples;
    }
    for (std::size_t r = 0; r < n; ++r)
        for (std::size_t c = 0; c < n; ++c)
            if (int k = table.cells[r][c].samples; k > 0) {
                table.cells[r][c].role1_mean = sums1[r][c] / k;
                table.cells[r][c].role2_mean = sums2[r][c] / k;
            }

    // Marginals recompute straight from the match records.
    for (std::size_t i = 0; i < n; ++i) {
        double sum1 = 0, sum2 = 0;
        int n1 = 0, n2 = 0;
        for (const auto& m : matches) {
            if (m.row_agent == agents[i]) {
                sum1 += m.row_payoff;
                ++n1;
            }
            if (m.col_agent == agents[i]) {
                sum2 += m.col_payoff;
                ++n2;
            }
        }
        table.row_marginal.push_back(n1 ? std::optional<double>(sum1 / n1) : std::nullopt);
        table.col_marginal.push_back(n2 ? std::optional<double>(sum2 / n2) : std::nullopt);
    }
    return table;
}

inline std::string format_score(const std::optional<double>& v, int precision = 2) {
    if (!v) return "-";
    std::ostringstream os;
    os << std::fixed << std::setprecision(precision) << *v;
    return os.str();
}

// Human-readable rendering of the pairwise table (dashed diagonal, role
// marginals on the rim).
inline std::string render_pairwise_table(const PairwiseTable& t) {
    std::ostringstream os;
    const std::size_t n = t.agents.size();
    os << "rows: " << t.role1_label << "  columns: " << t.role2_label << "\n";
    os << std::setw(14) << " ";
    for (const auto& a : t.agents) os << std::setw(18) << a;
    os << std::setw(12) << ("s_" + t.role1_label) << "\n";
    for (std::size_t r = 0; r < n; ++r) {
        os << std::setw(14) << t.agents[r];
        for (std::size_t c = 0; c < n; ++c) {
            const auto& cell = t.cells[r][c];
            std::string body = (r == c || cell.samples == 0)
                                   ? "-/-"
                                   : format_score(cell.role1_mean) + "/" +
                                         format_score(cell.role2_mean);
            os << std::setw(18) << body;
        }
        os << std::setw(12) << format_score(t.row_marginal[r]) << "\n";
    }
    os << std::setw(14) << ("s_" + t.role2_label);
    for (std::size_t c = 0; c < n; ++c) os << std::setw(18) << format_score(t.col_marginal[c]);
    os << "\n";
    return os.str();
}

inline nlohmann::ordered_json pairwise_table_json(const PairwiseTable& t) {
    nlohmann::ordered_json out;
    out["agents"] = t.agents;
    out["role1_label"] = t.role1_label;
    out["role2_label"] = t.role2_label;
    auto cells = nlohmann::ordered_json::array();
    for (std::size_t r = 0; r < t.agents.size(); ++r) {
        auto row = nlohmann::ordered_json::array();
        for (std::size_t c = 0; c < t.agents.size(); ++c) {
            const auto& cell = t.cells[r][c];
            nlohmann::ordered_json jc;
            jc["samples"] = cell.samples;
            jc["role1_mean"] = cell.role1_mean ? nlohmann::ordered_json(*cell.role1_mean)
                                               : nlohmann::ordered_json(nullptr);
            jc["role2_mean"] = cell.role2_mean ? nlohmann::ordered_json(*cell.role2_mean)
                                               : nlohmann::ordered_json(nullptr);
            row.push_back(jc);
        }
        cells.push_back(row);
    }
    out["cells"] = cells;
    auto marg = [](const std::vector<std::optional<double>>& m) {
        auto arr = nlohmann::ordered_json::array();
        for (const auto& v : m)
            arr.push_back(v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr));
        return arr;
    };
    out["row_marginal"] = marg(t.row_marginal);
    out["col_marginal"] = marg(t.col_marginal);
    return out;
}

}  // namespace arena
