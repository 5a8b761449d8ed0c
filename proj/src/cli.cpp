#include "fts/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

#include "fts/autocov.hpp"

namespace fts::cli {

namespace {

using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
    char buffer[32];
    auto [ptr, ec] = std::to_chars(buffer, buffer + sizeof(buffer), v);
    return std::string(buffer, ptr);
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

bool parse_field(std::string_view field, double& out) {
    field = trim(field);
    if (field.empty()) return false;
    const char* begin = field.data();
    const char* end = begin + field.size();
    auto [ptr, ec] = std::from_chars(begin, end, out);
    return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            break;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return fields;
}

bool looks_like_timestamp_header(std::string_view name) {
    std::string lower;
    lower.reserve(name.size());
    for (char c : trim(name)) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    return lower == "time" || lower == "timestamp" || lower == "date";
}

void write_file(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    out << content;
    if (!out) throw DataError("failed writing output file: " + path);
}

}  // namespace

FunctionalSeries read_curve_panel(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file: " + path);

    std::vector<std::vector<double>> rows;
    std::string line;
    int line_no = 0;
    int n_cols = -1;
    bool header_checked = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) {
            if (rows.empty() && !header_checked) continue;  // leading blank lines
            throw DataError(path + ": blank line at row " + std::to_string(line_no));
        }
        const auto fields = split_csv_line(line);
        std::vector<double> values(fields.size());
        bool all_numeric = true;
        std::size_t bad_col = 0;
        for (std::size_t c = 0; c < fields.size(); ++c) {
            if (!parse_field(fields[c], values[c])) {
                all_numeric = false;
                bad_col = c;
                break;
            }
        }
        if (!header_checked) {
            header_checked = true;
            if (!all_numeric) {
                // Header row. Deliberately no support for a leading
                // timestamps column: the grid is always reconstructed as
                // equidistant on [0, 1].
                if (looks_like_timestamp_header(fields[0]))
                    throw DataError(path + ": timestamp column detected; supply values-only panels "
                                           "(rows = observations, columns = equidistant grid points)");
                n_cols = static_cast<int>(fields.size());
                continue;
            }
        }
        if (!all_numeric)
            throw DataError(path + ": row " + std::to_string(line_no) + ", column " +
                            std::to_string(bad_col + 1) + ": not a number: '" +
                            std::string(trim(fields[bad_col])) + "'");
        for (std::size_t c = 0; c < values.size(); ++c) {
            if (!std::isfinite(values[c]))
                throw DataError(path + ": row " + std::to_string(line_no) + ", column " +
                                std::to_string(c + 1) + ": non-finite value");
        }
        if (n_cols == -1) n_cols = static_cast<int>(values.size());
        if (static_cast<int>(values.size()) != n_cols)
            throw DataError(path + ": row " + std::to_string(line_no) + " has " +
                            std::to_string(values.size()) + " fields, expected " + std::to_string(n_cols));
        rows.push_back(std::move(values));
    }
    if (rows.size() < 2) throw DataError(path + ": need at least 2 data rows, found " + std::to_string(rows.size()));
    if (n_cols < 2) throw DataError(path + ": need at least 2 columns, found " + std::to_string(n_cols));

    GridPtr grid = make_grid(n_cols);
    Eigen::MatrixXd data(static_cast<Eigen::Index>(rows.size()), n_cols);
    for (std::size_t t = 0; t < rows.size(); ++t)
        for (int c = 0; c < n_cols; ++c) data(static_cast<Eigen::Index>(t), c) = rows[t][static_cast<std::size_t>(c)];
    return FunctionalSeries(std::move(grid), std::move(data));
}

std::string report_to_json(const TestReport& report, int smooth_basis) {
    ordered_json doc;
    doc["version"] = kVersion;
    ordered_json config;
    config["replicates"] = report.replicates;
    config["alpha"] = report.alpha;
    config["seed"] = report.seed.seed;
    config["stream"] = report.seed.stream;
    config["smooth_basis"] = smooth_basis;
    doc["config"] = std::move(config);
    doc["n"] = report.sample_sizes;
    doc["M"] = report.total_observations;
    doc["block_sizes"] = report.block_sizes;
    doc["t_observed"] = report.t_observed;
    doc["p_value"] = report.p_value;
    doc["critical_value"] = report.critical_value;
    doc["reject"] = report.reject;
    doc["t_bootstrap"] = report.t_bootstrap;
    return doc.dump(2) + "\n";
}

TestReport report_from_json(const std::string& text) {
    const ordered_json doc = ordered_json::parse(text);
    TestReport report;
    report.replicates = doc.at("config").at("replicates").get<int>();
    report.alpha = doc.at("config").at("alpha").get<double>();
    report.seed.seed = doc.at("config").at("seed").get<std::uint64_t>();
    report.seed.stream = doc.at("config").at("stream").get<std::uint64_t>();
    report.sample_sizes = doc.at("n").get<std::vector<int>>();
    report.total_observations = doc.at("M").get<int>();
    report.block_sizes = doc.at("block_sizes").get<std::vector<int>>();
    report.t_observed = doc.at("t_observed").get<double>();
    report.p_value = doc.at("p_value").get<double>();
    report.critical_value = doc.at("critical_value").get<double>();
    report.reject = doc.at("reject").get<bool>();
    report.t_bootstrap = doc.at("t_bootstrap").get<std::vector<double>>();
    return report;
}

std::string rates_to_csv(const ExperimentResult& result) {
    std::ostringstream out;
    out << "family,delta,n,block_size,alpha,rejection_rate,mc_stderr,R,B,seed\n";
    const ExperimentSpec& spec = result.spec;
    for (Eigen::Index j = 0; j < result.rejection_rates.rows(); ++j) {
        for (Eigen::Index a = 0; a < result.rejection_rates.cols(); ++a) {
            out << to_string(spec.model2.family) << ',' << format_double(spec.model2.delta) << ','
                << spec.model2.n << ',' << spec.block_sizes[static_cast<std::size_t>(j)] << ','
                << format_double(spec.alphas[static_cast<std::size_t>(a)]) << ','
                << format_double(result.rejection_rates(j, a)) << ','
                << format_double(result.std_errors(j, a)) << ',' << spec.repetitions << ','
                << spec.bootstrap_replicates << ',' << spec.seed.seed << '\n';
        }
    }
    return out.str();
}

int cmd_test(const TestOptions& options) {
    try {
        if (options.files.size() < 2) {
            std::cerr << "test: need at least two input files\n";
            return kUsageError;
        }
        std::vector<FunctionalSeries> populations;
        populations.reserve(options.files.size());
        for (const std::string& path : options.files) populations.push_back(read_curve_panel(path));
        for (std::size_t i = 1; i < populations.size(); ++i) {
            if (populations[i].grid()->size() != populations[0].grid()->size())
                throw DataError(options.files[i] + ": has " + std::to_string(populations[i].grid()->size()) +
                                " columns but " + options.files[0] + " has " +
                                std::to_string(populations[0].grid()->size()));
        }
        if (options.smooth_basis > 0)
            for (FunctionalSeries& s : populations) s = fourier_smooth(s, options.smooth_basis);

        TestConfig config;
        config.block_sizes = options.block_sizes;
        config.replicates = options.replicates;
        config.alpha = options.alpha;
        config.seed = RngSeed{options.seed, 0};
        const TestReport report = run_test(populations, config);
        if (!std::isfinite(report.t_observed) || !std::isfinite(report.p_value)) {
            std::cerr << "test: non-finite statistic\n";
            return kNumericError;
        }
        write_file(options.out_path, report_to_json(report, options.smooth_basis));
        return kOk;
    } catch (const DataError& e) {
        std::cerr << "test: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "test: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "test: " << e.what() << '\n';
        return kNumericError;
    }
}

int cmd_diffkernel(const DiffKernelOptions& options) {
    try {
        const FunctionalSeries a = read_curve_panel(options.file_a);
        const FunctionalSeries b = read_curve_panel(options.file_b);
        if (a.grid()->size() != b.grid()->size())
            throw DataError("column counts differ: " + options.file_a + " has " +
                            std::to_string(a.grid()->size()) + ", " + options.file_b + " has " +
                            std::to_string(b.grid()->size()));
        const KernelOperator diff =
            squared_difference_kernel(empirical_autocov(a, 0), empirical_autocov(b, 0));

        std::ostringstream out;
        const int L = diff.size();
        for (int j = 0; j < L; ++j) out << (j ? "," : "") << format_double(diff.grid()->points()[j]);
        out << '\n';
        for (int i = 0; i < L; ++i) {
            for (int j = 0; j < L; ++j) out << (j ? "," : "") << format_double(diff.kernel()(i, j));
            out << '\n';
        }
        write_file(options.out_path, out.str());
        return kOk;
    } catch (const DataError& e) {
        std::cerr << "diffkernel: " << e.what() << '\n';
        return kDataError;
    } catch (const std::exception& e) {
        std::cerr << "diffkernel: " << e.what() << '\n';
        return kNumericError;
    }
}

ExperimentOptions resolve_preset(const ExperimentOptions& options) {
    if (options.preset.empty()) return options;
    ExperimentOptions opts = options;
    if (opts.preset == "table1-far-null") {
        opts.family = "FAR";
        opts.delta = 0.0;
        opts.n = 200;
        opts.block_sizes = {default_block_size(200)};
        opts.alphas = {0.05};
        opts.bootstrap_replicates = 500;
        opts.repetitions = 500;
        return opts;
    }
    throw std::invalid_argument("unknown preset '" + opts.preset + "'");
}

int cmd_experiment(const ExperimentOptions& options) {
    try {
        const ExperimentOptions opts = resolve_preset(options);

        ExperimentSpec spec;
        GridPtr grid = make_grid(21);
        spec.model1.family = model_family_from_string(opts.family);
        spec.model1.delta = 0.0;
        spec.model1.n = opts.n;
        spec.model1.grid = grid;
        spec.model2 = spec.model1;
        spec.model2.delta = opts.delta;
        spec.block_sizes = opts.block_sizes.empty() ? std::vector<int>{default_block_size(opts.n)}
                                                    : opts.block_sizes;
        spec.alphas = opts.alphas;
        spec.bootstrap_replicates = opts.bootstrap_replicates;
        spec.repetitions = opts.repetitions;
        spec.seed = RngSeed{opts.seed, 0};
        spec.smooth_basis = opts.smooth_basis;
        if (opts.psi_normalization == "unit") {
            spec.psi_normalization = PsiNormalization::UnitInterval;
        } else if (opts.psi_normalization == "real") {
            spec.psi_normalization = PsiNormalization::RealLine;
        } else {
            std::cerr << "experiment: unknown psi normalization '" << opts.psi_normalization << "'\n";
            return kUsageError;
        }

        const ExperimentResult result = run_experiment(spec);
        write_file(opts.out_path, rates_to_csv(result));
        return kOk;
    } catch (const DataError& e) {
        std::cerr << "experiment: " << e.what() << '\n';
        return kDataError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "experiment: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "experiment: " << e.what() << '\n';
        return kNumericError;
    }
}

}  // namespace fts::cli
