#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace blwave {

struct FitResult {
    double slope = 0.0, intercept = 0.0;
    double ci_low = 0.0, ci_high = 0.0;  // 95% bootstrap interval of the slope
    double r2 = 0.0;
    double t_min = 0.0, t_max = 0.0;
    int n = 0;
};

// Least squares of log v against log t over t in [t_min, t_max], with a seeded
// pairs bootstrap. Needs >= 20 samples in the window, all positive.
FitResult fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                             double t_max, int bootstrap = 1000, std::uint64_t seed = 1);

struct Series {
    std::string name;
    std::string unit;
    std::vector<double> values;
};

struct SeriesRecord {
    std::vector<Series> columns;
    std::vector<std::pair<std::string, FitResult>> fits;

    Series& add(const std::string& name, const std::string& unit, std::vector<double> values = {});
    const Series& at(const std::string& name) const;
};

// Header "name [unit]", RFC 4180 quoting, 17 significant digits. Fit results
// go to a sidecar file path + ".fits.csv" when present. Throws on I/O failure.
void export_series(const SeriesRecord& r, const std::string& path);
SeriesRecord read_series_csv(const std::string& path);
std::string format_double(double v);

// Flat key = value configuration. '#' starts a comment; values may be quoted.
class KeyValueConfig {
public:
    static KeyValueConfig parse(const std::string& text);
    static KeyValueConfig load(const std::string& path);

    bool has(const std::string& key) const { return kv_.count(key) != 0; }
    std::string get_string(const std::string& key, const std::string& def) const;
    double get_double(const std::string& key, double def) const;
    long long get_int(const std::string& key, long long def) const;
    bool get_bool(const std::string& key, bool def) const;
    void set(const std::string& key, const std::string& value) { kv_[key] = value; }
    const std::map<std::string, std::string>& items() const { return kv_; }
    std::string dump() const;
    // Keys not in `known`; used to reject typos.
    std::vector<std::string> unknown_keys(const std::vector<std::string>& known) const;

private:
    std::map<std::string, std::string> kv_;
};

}  // namespace blwave
