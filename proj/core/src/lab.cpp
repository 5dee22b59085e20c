#include "blwave/lab.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace blwave {

namespace {

struct Line {
    double slope, intercept, r2;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    Line l{};
    l.slope = sxx > 0.0 ? sxy / sxx : 0.0;
    l.intercept = my - l.slope * mx;
    l.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
    return l;
}

}  // namespace

FitResult fit_decay_exponent(const std::vector<double>& t, const std::vector<double>& v, double t_min,
                             double t_max, int bootstrap, std::uint64_t seed) {
    if (t.size() != v.size()) throw std::invalid_argument("fit_decay_exponent: size mismatch");
    std::vector<double> x, y;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] < t_min || t[i] > t_max) continue;
        if (!(v[i] > 0.0) || !(t[i] > 0.0))
            throw std::invalid_argument("fit_decay_exponent: nonpositive value in window at t=" +
                                        std::to_string(t[i]));
        x.push_back(std::log(t[i]));
        y.push_back(std::log(v[i]));
    }
    if (x.size() < 20)
        throw std::invalid_argument("fit_decay_exponent: need >= 20 samples in window, got " +
                                    std::to_string(x.size()));
    const Line l = least_squares(x, y);
    FitResult r;
    r.slope = l.slope;
    r.intercept = l.intercept;
    r.r2 = l.r2;
    r.n = int(x.size());
    r.t_min = std::exp(*std::min_element(x.begin(), x.end()));
    r.t_max = std::exp(*std::max_element(x.begin(), x.end()));
    r.ci_low = r.ci_high = l.slope;
    if (bootstrap > 0) {
        std::mt19937_64 rng(seed);
        std::uniform_int_distribution<std::size_t> pick(0, x.size() - 1);
        std::vector<double> slopes;
        slopes.reserve(bootstrap);
        std::vector<double> bx(x.size()), by(x.size());
        for (int b = 0; b < bootstrap; ++b) {
            for (std::size_t i = 0; i < x.size(); ++i) {
                const std::size_t j = pick(rng);
                bx[i] = x[j];
                by[i] = y[j];
            }
            slopes.push_back(least_squares(bx, by).slope);
        }
        std::sort(slopes.begin(), slopes.end());
        r.ci_low = slopes[std::size_t(0.025 * (bootstrap - 1))];
        r.ci_high = slopes[std::size_t(0.975 * (bootstrap - 1))];
    }
    return r;
}

Series& SeriesRecord::add(const std::string& name, const std::string& unit, std::vector<double> values) {
    columns.push_back(Series{name, unit, std::move(values)});
    return columns.back();
}

const Series& SeriesRecord::at(const std::string& name) const {
    for (const auto& c : columns)
        if (c.name == name) return c;
    throw std::out_of_range("SeriesRecord: no column '" + name + "'");
}

std::string format_double(double v) {
    char buf[40];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

namespace {

std::string quote(const std::string& s) {
    for (unsigned char ch : s)
        if (ch > 127) throw std::invalid_argument("export_series: non-ASCII header '" + s + "'");
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    bool q = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char ch = line[i];
        if (q) {
            if (ch == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    q = false;
                }
            } else {
                cur += ch;
            }
        } else if (ch == '"') {
            q = true;
        } else if (ch == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    out.push_back(cur);
    return out;
}

std::string header_cell(const Series& s) { return s.unit.empty() ? s.name : s.name + " [" + s.unit + "]"; }

void write_file(const std::string& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open '" + path + "' for writing");
    os << text;
    if (!os) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace

void export_series(const SeriesRecord& r, const std::string& path) {
    std::size_t rows = 0;
    for (const auto& c : r.columns) rows = std::max(rows, c.values.size());
    std::ostringstream os;
    for (std::size_t j = 0; j < r.columns.size(); ++j) os << (j ? "," : "") << quote(header_cell(r.columns[j]));
    os << "\r\n";
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < r.columns.size(); ++j) {
            if (j) os << ',';
            const auto& v = r.columns[j].values;
            if (i < v.size()) os << format_double(v[i]);
        }
        os << "\r\n";
    }
    write_file(path, os.str());
    if (!r.fits.empty()) {
        std::ostringstream fs;
        fs << "series,slope,ci_low,ci_high,intercept,r2,t_min,t_max,n\r\n";
        for (const auto& [name, f] : r.fits)
            fs << quote(name) << ',' << format_double(f.slope) << ',' << format_double(f.ci_low) << ','
               << format_double(f.ci_high) << ',' << format_double(f.intercept) << ',' << format_double(f.r2) << ','
               << format_double(f.t_min) << ',' << format_double(f.t_max) << ',' << f.n << "\r\n";
        write_file(path + ".fits.csv", fs.str());
    }
}

SeriesRecord read_series_csv(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("cannot open '" + path + "'");
    SeriesRecord r;
    std::string line;
    if (!std::getline(is, line)) return r;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) return r;
    for (const auto& cell : split_csv_line(line)) {
        Series s;
        const auto open = cell.rfind(" [");
        if (open != std::string::npos && !cell.empty() && cell.back() == ']') {
            s.name = cell.substr(0, open);
            s.unit = cell.substr(open + 2, cell.size() - open - 3);
        } else {
            s.name = cell;
        }
        r.columns.push_back(s);
    }
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto cells = split_csv_line(line);
        for (std::size_t j = 0; j < cells.size() && j < r.columns.size(); ++j) {
            if (cells[j].empty()) continue;
            double v = 0.0;
            const auto res = std::from_chars(cells[j].data(), cells[j].data() + cells[j].size(), v);
            if (res.ec != std::errc()) throw std::runtime_error("bad number '" + cells[j] + "' in " + path);
            r.columns[j].values.push_back(v);
        }
    }
    return r;
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(const std::string& text) {
    KeyValueConfig c;
    std::istringstream is(text);
    std::string line;
    int no = 0;
    while (std::getline(is, line)) {
        ++no;
        std::string body;
        bool q = false;
        for (char ch : line) {
            if (ch == '"') q = !q;
            if (ch == '#' && !q) break;
            body += ch;
        }
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string::npos)
            throw std::invalid_argument("config line " + std::to_string(no) + ": expected key = value");
        const std::string key = trim(body.substr(0, eq));
        std::string val = trim(body.substr(eq + 1));
        if (key.empty()) throw std::invalid_argument("config line " + std::to_string(no) + ": empty key");
        if (val.size() >= 2 && val.front() == '"' && val.back() == '"') val = val.substr(1, val.size() - 2);
        c.kv_[key] = val;
    }
    return c;
}

KeyValueConfig KeyValueConfig::load(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return parse(os.str());
}

std::string KeyValueConfig::get_string(const std::string& key, const std::string& def) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? def : it->second;
}

double KeyValueConfig::get_double(const std::string& key, double def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    double v = 0.0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("config key '" + key + "': not a number: " + s);
    return v;
}

long long KeyValueConfig::get_int(const std::string& key, long long def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    long long v = 0;
    const auto& s = it->second;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw std::invalid_argument("config key '" + key + "': not an integer: " + s);
    return v;
}

bool KeyValueConfig::get_bool(const std::string& key, bool def) const {
    const auto it = kv_.find(key);
    if (it == kv_.end()) return def;
    if (it->second == "true" || it->second == "1") return true;
    if (it->second == "false" || it->second == "0") return false;
    throw std::invalid_argument("config key '" + key + "': not a boolean: " + it->second);
}

std::string KeyValueConfig::dump() const {
    std::ostringstream os;
    for (const auto& [k, v] : kv_) {
        const bool needs_quote = v.empty() || v.find_first_of(" #\"=") != std::string::npos;
        os << k << " = " << (needs_quote ? "\"" + v + "\"" : v) << '\n';
    }
    return os.str();
}

std::vector<std::string> KeyValueConfig::unknown_keys(const std::vector<std::string>& known) const {
    std::vector<std::string> out;
    for (const auto& [k, v] : kv_)
        if (std::find(known.begin(), known.end(), k) == known.end()) out.push_back(k);
    return out;
}

}  // namespace blwave
