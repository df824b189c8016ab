// Command-line front end: sieving, local densities, singular series, and
// the spacing/correlation statistics. All numeric output is a pure function
// of the library calls; identical arguments give byte-identical output.
//
// Exit codes: 0 success, 2 usage error, 3 budget or coverage error.

#include "sots/sots.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

using namespace sots;

namespace {

// Numbers accept scientific notation and underscore separators: 1e9, 2_000_000.
std::string strip_underscores(const std::string& s) {
    std::string t;
    for (char c : s)
        if (c != '_') t.push_back(c);
    return t;
}

std::uint64_t parse_u64(const std::string& s, const std::string& flag) {
    std::string t = strip_underscores(s);
    char* end = nullptr;
    long double v = std::strtold(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0' || v < 0 || v > 1.8e19L || v != std::floor(v))
        throw domain_error(flag + ": expected a nonnegative integer, got '" + s + "'");
    return std::uint64_t(v);
}

double parse_real(const std::string& s, const std::string& flag) {
    std::string t = strip_underscores(s);
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end == t.c_str() || *end != '\0')
        throw domain_error(flag + ": expected a number, got '" + s + "'");
    return v;
}

// Comma-separated offsets; sorted automatically, duplicates rejected.
offset_set parse_offsets(const std::string& s) {
    std::vector<std::int64_t> v;
    std::string cur;
    auto flush = [&] {
        if (cur.empty()) throw domain_error("-h: empty offset in '" + s + "'");
        char* end = nullptr;
        long long val = std::strtoll(strip_underscores(cur).c_str(), &end, 10);
        if (end == strip_underscores(cur).c_str() || *end != '\0')
            throw domain_error("-h: bad offset '" + cur + "'");
        if (std::find(v.begin(), v.end(), val) != v.end())
            throw domain_error("-h: duplicate offset " + cur);
        v.push_back(val);
        cur.clear();
    };
    for (char c : s) {
        if (c == ',')
            flush();
        else
            cur.push_back(c);
    }
    flush();
    return offset_set(v);
}

// Region spec "i1,i2,...:l1,l2,..." or the box shorthand "k:lambda".
region parse_region(const std::string& s) {
    auto colon = s.find(':');
    if (colon == std::string::npos)
        throw domain_error("--region: expected 'parts:lambdas', got '" + s + "'");
    std::vector<unsigned> parts;
    std::vector<double> lambdas;
    std::string cur;
    for (char c : s.substr(0, colon) + ",") {
        if (c == ',') {
            parts.push_back(unsigned(parse_u64(cur, "--region parts")));
            cur.clear();
        } else
            cur.push_back(c);
    }
    for (char c : s.substr(colon + 1) + ",") {
        if (c == ',') {
            lambdas.push_back(parse_real(cur, "--region lambdas"));
            cur.clear();
        } else
            cur.push_back(c);
    }
    return region(parts, lambdas);
}

std::pair<std::uint64_t, std::uint64_t> parse_window_spec(const std::string& s) {
    auto comma = s.find(',');
    if (comma == std::string::npos)
        throw domain_error("--window: expected 'X,W', got '" + s + "'");
    return {parse_u64(s.substr(0, comma), "--window X"),
            parse_u64(s.substr(comma + 1), "--window W")};
}

struct output {
    std::unique_ptr<std::ofstream> file;
    std::ostream& stream() { return file ? *file : std::cout; }
    void open(const std::string& path) {
        if (path.empty()) return;
        file = std::make_unique<std::ofstream>(path, std::ios::binary);
        if (!*file) throw domain_error("--out: cannot open '" + path + "'");
    }
};

std::string g10(long double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.10Lg", v);
    return buf;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"arithmetic and spectral statistics of sums of two squares"};
    app.set_help_flag("--help", "print help");
    app.require_subcommand(1);

    std::string out_path, offsets_str, x_str, window_str, region_str, xlist_str, format = "text";
    std::string cutoff_str, lambda_str = "1", y_str, p_str, alpha_str, k_str, ell_str, bins_str = "32";
    std::string mmax_str = "8";
    bool with_zero = false;

    auto add_common = [&](CLI::App* sub) {
        sub->set_help_flag("--help", "print help"); // frees -h for offsets
        sub->add_option("--out", out_path, "write output to a file instead of stdout");
    };

    auto* c_sieve = app.add_subcommand("sieve", "dump a membership window");
    c_sieve->add_option("-x", x_str, "sieve [0,x]");
    c_sieve->add_option("--window", window_str, "sieve [X,X+W) given as X,W");
    add_common(c_sieve);

    auto* c_count = app.add_subcommand("count", "N(x): members in [1,x]");
    c_count->add_option("-x", x_str)->required();
    add_common(c_count);

    auto* c_density = app.add_subcommand("density", "exact local density at one prime");
    c_density->add_option("-h,--offsets", offsets_str)->required();
    c_density->add_option("-p", p_str)->required();
    add_common(c_density);

    auto* c_sss = app.add_subcommand("sss", "singular series with tail bound");
    c_sss->add_option("-h,--offsets", offsets_str)->required();
    c_sss->add_option("--cutoff", cutoff_str);
    c_sss->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));
    add_common(c_sss);

    auto* c_adm = app.add_subcommand("admissible", "does the singular series vanish?");
    c_adm->add_option("-h,--offsets", offsets_str)->required();
    add_common(c_adm);

    auto* c_corr = app.add_subcommand("correlate", "tuple count vs prediction");
    c_corr->add_option("-h,--offsets", offsets_str)->required();
    c_corr->add_option("-x", x_str)->required();
    c_corr->add_option("--cutoff", cutoff_str);
    add_common(c_corr);

    auto* c_table = app.add_subcommand("table", "CSV of count vs prediction rows");
    c_table->add_option("-h,--offsets", offsets_str)->required();
    c_table->add_option("--x-list", xlist_str)->required();
    c_table->add_option("--cutoff", cutoff_str);
    add_common(c_table);

    bool plot = false;
    auto* c_spac = app.add_subcommand("spacings", "rescaled nearest-neighbor gap histogram");
    c_spac->add_option("--window", window_str)->required();
    c_spac->add_option("--bins", bins_str);
    c_spac->add_flag("--plot", plot, "two-column (t, density) output for plotting");
    add_common(c_spac);

    auto* c_int = app.add_subcommand("intervals", "counts in sliding intervals vs Poisson");
    c_int->add_option("-x", x_str)->required();
    c_int->add_option("--lambda", lambda_str);
    c_int->add_option("--m-max", mmax_str);
    c_int->add_option("-y", y_str, "override y (default x/N(x))");
    add_common(c_int);

    auto* c_mom = app.add_subcommand("moments", "empirical interval-count moments vs Poisson");
    c_mom->add_option("-x", x_str)->required();
    c_mom->add_option("--ell", ell_str)->required();
    c_mom->add_option("--lambda", lambda_str);
    c_mom->add_option("-y", y_str, "override y (default x/N(x))");
    add_common(c_mom);

    auto* c_avg = app.add_subcommand("avg-sss", "average singular series over a dilated region");
    c_avg->add_option("-k", k_str)->required();
    c_avg->add_option("--region", region_str)->required();
    c_avg->add_option("-y", y_str)->required();
    c_avg->add_option("--cutoff", cutoff_str);
    c_avg->add_flag("--with-zero", with_zero, "use o = {0} instead of the empty anchor");
    add_common(c_avg);

    auto* c_can = app.add_subcommand("cancel-check", "exact epsilon cancellation over residues");
    c_can->add_option("-p", p_str)->required();
    c_can->add_option("--alpha", alpha_str)->required();
    c_can->add_option("-k", k_str)->required();
    add_common(c_can);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    output out;
    try {
        out.open(out_path);
        std::ostream& os = out.stream();

        if (c_sieve->parsed()) {
            sieve_window w;
            if (!window_str.empty()) {
                auto [X, W] = parse_window_spec(window_str);
                w = window_sieve(X, W);
            } else if (!x_str.empty()) {
                w = sieve_upto(parse_u64(x_str, "-x"));
            } else {
                throw domain_error("sieve: need -x or --window");
            }
            dump_window(w, os);
        } else if (c_count->parsed()) {
            std::uint64_t x = parse_u64(x_str, "-x");
            auto w = sieve_upto(x);
            os << count(w, x) << "\n";
        } else if (c_density->parsed()) {
            auto h = parse_offsets(offsets_str);
            std::uint64_t p = parse_u64(p_str, "-p");
            if (!is_prime(p)) throw domain_error("-p: not a prime");
            os << to_fraction_string(delta(h, p).value) << "\n";
        } else if (c_sss->parsed()) {
            auto h = parse_offsets(offsets_str);
            std::uint64_t P = cutoff_str.empty() ? default_cutoff : parse_u64(cutoff_str, "--cutoff");
            auto s = singular_series(h, P);
            if (format == "json") {
                nlohmann::ordered_json j;
                j["value"] = double(s.value);
                j["tail_bound"] = double(s.tail_bound);
                j["cutoff"] = s.cutoff;
                j["factors"] = nlohmann::ordered_json::array();
                for (auto& [p, f] : s.local_factors) {
                    auto num = boost::multiprecision::numerator(f);
                    auto den = boost::multiprecision::denominator(f);
                    nlohmann::ordered_json jf{{"p", p}};
                    if (num <= std::numeric_limits<std::int64_t>::max() &&
                        den <= std::numeric_limits<std::int64_t>::max()) {
                        jf["num"] = num.convert_to<std::int64_t>();
                        jf["den"] = den.convert_to<std::int64_t>();
                    } else {
                        jf["num"] = num.str();
                        jf["den"] = den.str();
                    }
                    j["factors"].push_back(jf);
                }
                j["admissible"] = s.admissible;
                os << j.dump(2) << "\n";
            } else {
                os << "value " << g10(s.value) << "\n";
                os << "tail_bound " << g10(s.tail_bound) << "\n";
                os << "cutoff " << s.cutoff << "\n";
                for (auto& [p, f] : s.local_factors)
                    os << "factor p=" << p << " " << to_fraction_string(f) << "\n";
                os << "admissible " << (s.admissible ? "true" : "false") << "\n";
            }
        } else if (c_adm->parsed()) {
            os << (is_admissible(parse_offsets(offsets_str)) ? "true" : "false") << "\n";
        } else if (c_corr->parsed()) {
            auto h = parse_offsets(offsets_str);
            std::uint64_t x = parse_u64(x_str, "-x");
            std::uint64_t P = cutoff_str.empty() ? table_cutoff : parse_u64(cutoff_str, "--cutoff");
            auto w = sieve_upto(x + std::uint64_t(std::max<std::int64_t>(h.max(), 0)) + 1);
            auto rep = correlation(h, x, w, P);
            os << "count " << rep.count << "\n";
            os << "prediction " << g10(rep.predicted_count) << "\n";
            os << "ratio " << g10(rep.ratio) << "\n";
            os << "error_term " << g10(rep.error_term) << "\n";
        } else if (c_table->parsed()) {
            auto h = parse_offsets(offsets_str);
            std::vector<std::uint64_t> xs;
            std::string cur;
            for (char c : xlist_str + ",") {
                if (c == ',') {
                    xs.push_back(parse_u64(cur, "--x-list"));
                    cur.clear();
                } else
                    cur.push_back(c);
            }
            std::uint64_t P = cutoff_str.empty() ? table_cutoff : parse_u64(cutoff_str, "--cutoff");
            std::uint64_t xmax = *std::max_element(xs.begin(), xs.end());
            auto w = sieve_upto(xmax + std::uint64_t(std::max<std::int64_t>(h.max(), 0)) + 1);
            os << "x,count,prediction,ratio\n";
            for (auto& row : table_rows(h, xs, w, P))
                os << row.x << "," << row.count << "," << g10(row.prediction) << ","
                   << g10(row.ratio) << "\n";
        } else if (c_spac->parsed()) {
            auto [X, W] = parse_window_spec(window_str);
            auto w = window_sieve(X, W);
            auto sp = spacing(w, unsigned(parse_u64(bins_str, "--bins")));
            os << "# elements " << sp.element_count << " mean_gap " << g10(sp.mean_gap)
               << " sup_cdf_distance " << g10(sp.sup_cdf_distance) << "\n";
            if (plot) {
                for (std::size_t b = 0; b < sp.masses.size(); ++b) {
                    double width = sp.edges[b + 1] - sp.edges[b];
                    os << g10((sp.edges[b] + sp.edges[b + 1]) / 2) << " "
                       << g10(sp.masses[b] / width) << "\n";
                }
            } else {
                os << "bin_lo,bin_hi,mass,exp_reference\n";
                for (std::size_t b = 0; b < sp.masses.size(); ++b)
                    os << g10(sp.edges[b]) << "," << g10(sp.edges[b + 1]) << ","
                       << g10(sp.masses[b]) << "," << g10(sp.exp_reference[b]) << "\n";
            }
        } else if (c_int->parsed()) {
            std::uint64_t x = parse_u64(x_str, "-x");
            double lambda = parse_real(lambda_str, "--lambda");
            unsigned mmax = unsigned(parse_u64(mmax_str, "--m-max"));
            auto w = sieve_upto(x + std::uint64_t(std::ceil(lambda * 16)) + 64);
            double y = y_str.empty() ? double(x) / double(count(w, x)) : parse_real(y_str, "-y");
            auto rep = interval_counts(x, lambda, y, w, mmax);
            os << "m,empirical,poisson\n";
            for (unsigned m = 0; m <= mmax; ++m)
                os << m << "," << g10(rep.empirical[m]) << "," << g10(rep.poisson[m]) << "\n";
        } else if (c_mom->parsed()) {
            std::uint64_t x = parse_u64(x_str, "-x");
            unsigned ell = unsigned(parse_u64(ell_str, "--ell"));
            double lambda = parse_real(lambda_str, "--lambda");
            auto w = sieve_upto(x + std::uint64_t(std::ceil(lambda * 16)) + 64);
            double y = y_str.empty() ? double(x) / double(count(w, x)) : parse_real(y_str, "-y");
            os << "ell,empirical,poisson\n";
            for (unsigned l = 1; l <= ell; ++l)
                os << l << "," << g10(empirical_moment(l, x, lambda, y, w)) << ","
                   << g10(poisson_moment(l, lambda)) << "\n";
        } else if (c_avg->parsed()) {
            region reg = parse_region(region_str);
            unsigned k = unsigned(parse_u64(k_str, "-k"));
            if (reg.dimension() != k)
                throw domain_error("-k does not match the region dimension");
            double y = parse_real(y_str, "-y");
            std::uint64_t P = cutoff_str.empty() ? 100'000'000ull : parse_u64(cutoff_str, "--cutoff");
            auto rep = singular_series_average(reg, with_zero, y, P);
            os << "points " << rep.points << "\n";
            os << "sum " << g10(rep.sum) << "\n";
            os << "expected " << g10(rep.expected) << "\n";
            os << "rel_error " << g10(rep.rel_error) << "\n";
        } else if (c_can->parsed()) {
            std::uint64_t p = parse_u64(p_str, "-p");
            unsigned alpha = unsigned(parse_u64(alpha_str, "--alpha"));
            unsigned k = unsigned(parse_u64(k_str, "-k"));
            for (bool z : {false, true}) {
                auto rep = cancellation_sum(z, p, alpha, k);
                os << "o=" << (z ? "{0}" : "{}") << " tuples=" << rep.tuples << " sum="
                   << to_fraction_string(rep.sum)
                   << " exact_zero=" << (rep.sum == rational(0) ? "true" : "false") << "\n";
            }
        }
    } catch (const budget_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const coverage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
