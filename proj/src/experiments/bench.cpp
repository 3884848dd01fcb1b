#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "pact/experiments/experiments.hpp"

namespace pact::experiments {

using nlohmann::json;

std::vector<ExperimentConfig> SweepConfig::cells() const {
    if (repeats == 0) throw std::invalid_argument("repeats must be at least 1");
    std::vector<ExperimentConfig> out;
    // a scenario file fixes M and N
    const std::vector<std::size_t> ms = scenario_file ? std::vector<std::size_t>{0} : m;
    const std::vector<std::size_t> ns = scenario_file ? std::vector<std::size_t>{0} : n;
    const std::vector<std::optional<double>> alphas =
        scenario_file ? std::vector<std::optional<double>>{std::nullopt} : alpha;
    for (std::size_t kk : k)
        for (std::size_t mm : ms)
            for (std::size_t nn : ns)
                for (const auto& a : alphas)
                    for (std::size_t r = 0; r < repeats; ++r)
                        for (Method method : methods) {
                            ExperimentConfig c;
                            c.scenario_file = scenario_file;
                            c.k = kk;
                            c.m = mm;
                            c.n = nn;
                            c.alpha = a;
                            c.method = method;
                            c.repeat = r;
                            c.seed = repeat_seed(seed, r);
                            c.params = params;
                            out.push_back(std::move(c));
                        }
    return out;
}

namespace {

template <typename T>
std::vector<T> read_list(const json& doc, const char* key, std::vector<T> fallback) {
    if (!doc.contains(key)) return fallback;
    const auto& v = doc.at(key);
    if (!v.is_array() || v.empty()) throw std::invalid_argument(std::string("sweep: '") + key + "' must be a non-empty list");
    return v.get<std::vector<T>>();
}

}  // namespace

SweepConfig parse_sweep(const std::string& json_text, SweepConfig defaults) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep: parse error: ") + e.what());
    }
    if (!doc.is_object()) throw std::invalid_argument("sweep: top level must be an object");
    SweepConfig s = std::move(defaults);
    try {
        s.k = read_list<std::size_t>(doc, "K", s.k);
        s.m = read_list<std::size_t>(doc, "M", s.m);
        s.n = read_list<std::size_t>(doc, "N", s.n);
        if (doc.contains("alpha")) {
            const auto& a = doc.at("alpha");
            if (!a.is_array() || a.empty()) throw std::invalid_argument("sweep: 'alpha' must be a non-empty list");
            s.alpha.clear();
            for (const auto& x : a) s.alpha.push_back(x.is_null() ? std::nullopt : std::optional<double>(x.get<double>()));
        }
        if (doc.contains("methods")) {
            s.methods.clear();
            for (const auto& x : doc.at("methods")) s.methods.push_back(method_from_string(x.get<std::string>()));
        }
        if (doc.contains("repeats")) s.repeats = doc.at("repeats").get<std::size_t>();
        if (doc.contains("seed")) s.seed = doc.at("seed").get<std::uint64_t>();
    } catch (const json::exception& e) {
        throw std::invalid_argument(std::string("sweep: ") + e.what());
    }
    for (auto kk : s.k)
        if (kk == 0) throw std::invalid_argument("sweep: K values must be at least 1");
    return s;
}

SweepConfig load_sweep(const std::filesystem::path& path, SweepConfig defaults) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open sweep file " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_sweep(buf.str(), std::move(defaults));
}

BenchOutput run_bench(const SweepConfig& sweep, const std::filesystem::path& out_dir) {
    auto cells = sweep.cells();
    std::filesystem::create_directories(out_dir / "scenarios");
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (cells[i].method == Method::kEvolve) {
            char name[64];
            std::snprintf(name, sizeof name, "evolve/cell-%04zu", i);
            cells[i].artifacts_dir = out_dir / name;
        }

    std::vector<std::optional<ExperimentResult>> results(cells.size());
    std::vector<std::string> errors(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++) {
            try {
                results[i] = run_experiment(cells[i]);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
        }
    };
    const std::size_t threads = std::min(std::max<std::size_t>(sweep.workers, 1), cells.size());
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    for (std::size_t i = 0; i < cells.size(); ++i)
        if (!results[i]) throw std::runtime_error("bench cell " + std::to_string(i) + " failed: " + errors[i]);

    BenchOutput output;
    output.csv = out_dir / "results.csv";
    std::ofstream csv(output.csv);
    std::ofstream contracts(out_dir / "contracts.jsonl");
    if (!csv || !contracts) throw std::runtime_error("cannot write bench output under " + out_dir.string());
    csv << kCsvHeader << '\n';
    for (std::size_t i = 0; i < cells.size(); ++i) {
        const auto& r = *results[i];
        csv << csv_row(cells[i], r) << '\n';
        json line{{"row", i},
                  {"scenario_digest", r.scenario_digest},
                  {"method", to_string(cells[i].method)},
                  {"repeat", cells[i].repeat},
                  {"seed", cells[i].seed},
                  {"contract", r.contract.payments()},
                  {"pi_T", r.metrics.pi_t}};
        if (r.evolution_digest) line["evolution_digest"] = *r.evolution_digest;
        contracts << line.dump() << '\n';
        const auto scenario_path = out_dir / "scenarios" / (r.scenario_digest + ".json");
        if (!std::filesystem::exists(scenario_path)) save_scenario(r.scenario, scenario_path);
        ++output.rows;
        if (r.status.rfind("ok", 0) != 0) ++output.failures;
    }
    return output;
}

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::stringstream ss(s);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (!s.empty() && s.back() == ',') cells.emplace_back();
        return cells;
    };
    if (!std::getline(in, line)) throw std::runtime_error("CSV is empty");
    table.header = split(line);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != table.header.size())
            throw std::runtime_error("CSV row has " + std::to_string(cells.size()) + " cells, header has " +
                                     std::to_string(table.header.size()));
        table.rows.push_back(std::move(cells));
    }
    return table;
}

namespace {

std::size_t column(const CsvTable& t, const std::string& name) {
    const auto it = std::find(t.header.begin(), t.header.end(), name);
    if (it == t.header.end()) throw std::runtime_error("CSV has no column '" + name + "'");
    return static_cast<std::size_t>(it - t.header.begin());
}

}  // namespace

ReplayReport replay_bench(const std::filesystem::path& out_dir, double tol) {
    ReplayReport report;
    std::ifstream csv_in(out_dir / "results.csv");
    std::ifstream contracts_in(out_dir / "contracts.jsonl");
    if (!csv_in || !contracts_in) throw std::runtime_error("bench output incomplete under " + out_dir.string());
    const CsvTable table = read_csv(csv_in);
    const std::size_t digest_col = column(table, "scenario_digest");
    const std::size_t seed_col = column(table, "seed");
    const std::size_t pi_col = column(table, "pi_T");

    std::vector<json> sidecar;
    std::string line;
    while (std::getline(contracts_in, line))
        if (!line.empty()) sidecar.push_back(json::parse(line));
    if (sidecar.size() != table.rows.size()) {
        report.problems.push_back("contracts.jsonl has " + std::to_string(sidecar.size()) + " rows, CSV has " +
                                  std::to_string(table.rows.size()));
        report.mismatches = table.rows.size();
        return report;
    }

    std::map<std::string, Scenario> scenarios;
    for (std::size_t i = 0; i < table.rows.size(); ++i) {
        const auto& row = table.rows[i];
        const auto& side = sidecar[i];
        ++report.rows;
        const std::string digest = row[digest_col];
        auto fail = [&](const std::string& why) {
            ++report.mismatches;
            report.problems.push_back("row " + std::to_string(i) + ": " + why);
        };
        if (side.at("scenario_digest").get<std::string>() != digest ||
            std::to_string(side.at("seed").get<std::uint64_t>()) != row[seed_col]) {
            fail("sidecar does not match CSV keys");
            continue;
        }
        auto it = scenarios.find(digest);
        if (it == scenarios.end()) {
            Scenario s = load_scenario(out_dir / "scenarios" / (digest + ".json"));
            if (scenario_digest(s) != digest) {
                fail("stored scenario digest mismatch");
                continue;
            }
            it = scenarios.emplace(digest, std::move(s)).first;
        }
        const Scenario& s = it->second;
        const Contract contract(side.at("contract").get<std::vector<double>>());
        const double replayed = principal_utility(contract, s.setting, s.market, s.outcomes);
        const double stored = side.at("pi_T").get<double>();
        const double err = std::abs(replayed - stored);
        report.max_abs_error = std::max(report.max_abs_error, err);
        if (err > tol) fail("pi_T " + format_number(replayed) + " differs from stored " + format_number(stored));
        else if (format_number(replayed) != row[pi_col])
            fail("CSV pi_T " + row[pi_col] + " differs from replay " + format_number(replayed));
    }
    return report;
}

std::string summarize(const CsvTable& table) {
    const std::size_t method = column(table, "method"), k = column(table, "K"), m = column(table, "M"),
                      n = column(table, "N"), alpha = column(table, "alpha"), pi = column(table, "pi_T"),
                      pct = column(table, "pi_T_pct"), pia = column(table, "pi_A"), eta = column(table, "eta"),
                      status = column(table, "status");
    struct Acc {
        std::size_t rows{0}, failures{0};
        double pi{0}, pia{0};
        double pct{0}, eta{0};
        std::size_t pct_n{0}, eta_n{0};
    };
    std::vector<std::string> order;
    std::map<std::string, Acc> groups;
    for (const auto& row : table.rows) {
        const std::string key = row[method] + "\t" + row[k] + "\t" + row[m] + "\t" + row[n] + "\t" + row[alpha];
        if (!groups.count(key)) order.push_back(key);
        Acc& a = groups[key];
        ++a.rows;
        if (row[status].rfind("ok", 0) != 0) ++a.failures;
        a.pi += std::stod(row[pi]);
        a.pia += std::stod(row[pia]);
        if (row[pct] != "NA") {
            a.pct += std::stod(row[pct]);
            ++a.pct_n;
        }
        if (row[eta] != "NA") {
            a.eta += std::stod(row[eta]);
            ++a.eta_n;
        }
    }
    std::ostringstream out;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%-10s %6s %4s %4s %10s %5s %12s %12s %12s %10s %5s\n", "method", "K", "M", "N",
                  "alpha", "rows", "mean_pi_T", "mean_pi_T%", "mean_pi_A", "mean_eta", "fail");
    out << buf;
    for (const auto& key : order) {
        const Acc& a = groups[key];
        std::vector<std::string> parts;
        std::stringstream ks(key);
        std::string part;
        while (std::getline(ks, part, '\t')) parts.push_back(part);
        const auto mean = [](double sum, std::size_t count) {
            return count ? format_number(sum / static_cast<double>(count)) : std::string("NA");
        };
        std::snprintf(buf, sizeof buf, "%-10s %6s %4s %4s %10s %5zu %12s %12s %12s %10s %5zu\n", parts[0].c_str(),
                      parts[1].c_str(), parts[2].c_str(), parts[3].c_str(), parts[4].c_str(), a.rows,
                      mean(a.pi, a.rows).c_str(), mean(a.pct, a.pct_n).c_str(), mean(a.pia, a.rows).c_str(),
                      mean(a.eta, a.eta_n).c_str(), a.failures);
        out << buf;
    }
    return out.str();
}

}  // namespace pact::experiments
