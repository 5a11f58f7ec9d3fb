#ifndef BENTHIC_CONFIG_HPP
#define BENTHIC_CONFIG_HPP

#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <numbers>
#include <optional>
#include <ostream>
#include <set>
#include <string>
#include <vector>

#include "benthic/errors.hpp"
#include "benthic/homogeneous.hpp"
#include "benthic/parameters.hpp"
#include "benthic/pde.hpp"

namespace benthic {

/// Malformed configuration or command line. The CLI maps this to exit code 2.
class UsageError : public Error {
public:
    using Error::Error;
};

namespace detail {

inline std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return {};
    return s.substr(a, s.find_last_not_of(" \t\r\n") - a + 1);
}

inline std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string::size_type a = 0;
    while (true) {
        const auto b = s.find(sep, a);
        out.push_back(trim(s.substr(a, b == std::string::npos ? std::string::npos : b - a)));
        if (b == std::string::npos) break;
        a = b + 1;
    }
    return out;
}

inline double to_double(const std::string& s, const std::string& what) {
    double x = 0.0;
    const auto t = trim(s);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
        throw UsageError(what + ": '" + s + "' is not a number");
    }
    return x;
}

inline long to_long(const std::string& s, const std::string& what) {
    long x = 0;
    const auto t = trim(s);
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), x);
    if (ec != std::errc() || p != t.data() + t.size() || t.empty()) {
        throw UsageError(what + ": '" + s + "' is not an integer");
    }
    return x;
}

}  // namespace detail

/// Flat key = value configuration. Later sources override earlier ones.
class Config {
public:
    static Config parse(std::istream& is, const std::string& source = "config") {
        Config c;
        int lineno = 0;
        for (std::string line; std::getline(is, line);) {
            ++lineno;
            const auto hash = line.find('#');
            if (hash != std::string::npos) line.erase(hash);
            line = detail::trim(line);
            if (line.empty()) continue;
            const auto eq = line.find('=');
            if (eq == std::string::npos) {
                throw UsageError(source + ":" + std::to_string(lineno) + ": expected 'key = value'");
            }
            const std::string key = detail::trim(line.substr(0, eq));
            if (key.empty()) throw UsageError(source + ":" + std::to_string(lineno) + ": empty key");
            if (c.values_.count(key)) throw UsageError(source + ":" + std::to_string(lineno) + ": duplicate key '" + key + "'");
            c.values_[key] = detail::trim(line.substr(eq + 1));
        }
        return c;
    }

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void merge(const Config& over) {
        for (const auto& [k, v] : over.values_) values_[k] = v;
    }
    bool has(const std::string& key) const { return values_.count(key) > 0; }

    /// Rejects keys outside `allowed`.
    void require_known(const std::set<std::string>& allowed) const {
        for (const auto& [k, v] : values_)
            if (!allowed.count(k)) throw UsageError("unknown configuration key '" + k + "'");
    }

    std::string text(const std::string& key, const std::string& fallback) {
        auto it = values_.find(key);
        if (it == values_.end()) {
            values_[key] = fallback;
            return fallback;
        }
        return it->second;
    }
    double number(const std::string& key, double fallback) {
        if (!has(key)) {
            // shortest text that reads back to the same double
            char buf[64];
            const auto r = std::to_chars(buf, buf + sizeof buf, fallback);
            values_[key] = std::string(buf, r.ptr);
            return fallback;
        }
        return detail::to_double(values_.at(key), key);
    }
    long integer(const std::string& key, long fallback) {
        if (!has(key)) {
            values_[key] = std::to_string(fallback);
            return fallback;
        }
        return detail::to_long(values_.at(key), key);
    }

    const std::map<std::string, std::string>& values() const noexcept { return values_; }

    /// Sorted `key = value` lines; reading them back gives the same configuration.
    void write(std::ostream& os) const {
        for (const auto& [k, v] : values_) os << k << " = " << v << '\n';
    }

private:
    std::map<std::string, std::string> values_;
};

struct Range {
    double lo = 0.0;
    double hi = 0.0;
    int n = 1;
};

/// `a:b:n` with a < b and n >= 1.
inline Range parse_range(const std::string& s, const std::string& what) {
    const auto parts = detail::split(s, ':');
    if (parts.size() != 3) throw UsageError(what + ": expected 'lo:hi:n', got '" + s + "'");
    Range r{detail::to_double(parts[0], what), detail::to_double(parts[1], what),
            static_cast<int>(detail::to_long(parts[2], what))};
    if (!(r.hi > r.lo) || r.n < 1) throw UsageError(what + ": need lo < hi and n >= 1 in '" + s + "'");
    return r;
}

/// Physical parameters from the keys k, v0, eps, m, delta_u, delta_v, sigma, gamma.
inline ParameterSet parameters_from(Config& c, bool with_sigma = true, bool with_gamma = true) {
    ParameterSet p;
    p.k = c.number("k", p.k);
    p.v0 = c.number("v0", p.v0);
    p.eps = c.number("eps", p.eps);
    p.m = c.number("m", p.m);
    p.delta_u = c.number("delta_u", p.delta_u);
    p.delta_v = c.number("delta_v", p.delta_v);
    if (with_sigma) p.sigma = c.number("sigma", p.sigma);
    if (with_gamma) p.gamma = c.number("gamma", p.gamma);
    try {
        p.validate();
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }
    return p;
}

inline const std::set<std::string>& parameter_keys() {
    static const std::set<std::string> keys{"k", "v0", "eps", "m", "delta_u", "delta_v", "sigma", "gamma"};
    return keys;
}

/// Wavenumber of the Turing point with the largest sigma of root 1, used as a length unit.
inline double reference_wavenumber(const ParameterSet& p) {
    const auto cps = critical_points(p, 1e-3, 0.3, 1);
    if (cps.empty()) throw NotFoundError("no Turing point for gamma = " + std::to_string(p.gamma) + " in (0.001, 0.3)");
    return cps.back().k;
}

/// Length with an optional unit: `wl` is 2 pi / k_ref, `hwl` is 2 pi / (sqrt 3 k_ref).
inline double parse_length(const std::string& s, double k_ref, const std::string& what) {
    std::string t = detail::trim(s);
    double unit = 1.0;
    auto strip = [&](const char* suffix, double u) {
        const std::string suf(suffix);
        if (t.size() > suf.size() && t.compare(t.size() - suf.size(), suf.size(), suf) == 0) {
            t.erase(t.size() - suf.size());
            unit = u;
            return true;
        }
        return false;
    };
    const double wl = 2.0 * std::numbers::pi / k_ref;
    if (!strip("hwl", wl / std::sqrt(3.0))) strip("wl", wl);
    return detail::to_double(t, what) * unit;
}

/// Axis from `lo:hi` (nodes chosen for `per_wavelength` points per 2 pi / k_ref) or `lo:hi:n`.
inline Axis parse_axis(const std::string& s, double k_ref, int per_wavelength, const std::string& what) {
    const auto parts = detail::split(s, ':');
    if (parts.size() != 2 && parts.size() != 3) throw UsageError(what + ": expected 'lo:hi[:n]', got '" + s + "'");
    Axis a;
    a.lo = parse_length(parts[0], k_ref, what);
    a.hi = parse_length(parts[1], k_ref, what);
    if (!(a.hi > a.lo)) throw UsageError(what + ": need lo < hi in '" + s + "'");
    a.n = parts.size() == 3 ? static_cast<int>(detail::to_long(parts[2], what))
                            : nodes_for(a.hi - a.lo, k_ref, per_wavelength);
    if (a.n < 3) throw UsageError(what + ": an axis needs at least 3 nodes");
    return a;
}

/// Domain from the keys x, y (optional), per_wavelength and k_ref (default: the Turing wavenumber).
inline Domain domain_from(Config& c, const ParameterSet& p) {
    const int per = static_cast<int>(c.integer("per_wavelength", 16));
    if (per < 2) throw UsageError("per_wavelength must be at least 2");
    const double k_ref = c.has("k_ref") ? c.number("k_ref", 0.0) : c.number("k_ref", reference_wavenumber(p));
    if (!(k_ref > 0.0)) throw UsageError("k_ref must be positive");
    const Axis x = parse_axis(c.text("x", "-2wl:2wl"), k_ref, per, "x");
    const std::string ys = c.text("y", "none");
    if (ys == "none") return Domain::line(x.lo, x.hi, x.n);
    const Axis y = parse_axis(ys, k_ref, per, "y");
    return Domain::rect(x.lo, x.hi, x.n, y.lo, y.hi, y.n);
}

inline const std::set<std::string>& domain_keys() {
    static const std::set<std::string> keys{"x", "y", "per_wavelength", "k_ref"};
    return keys;
}

}  // namespace benthic

#endif
