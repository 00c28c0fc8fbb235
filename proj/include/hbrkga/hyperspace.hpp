#pragma once

/// @file hyperspace.hpp
/// @brief Typed, bounded hyperparameter spaces and the mapping between
/// random-key vectors in [0,1]^n and concrete hyperparameter vectors.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <hbrkga/errors.hpp>

namespace hbrkga {

enum class DimKind { integer, real };

inline const char* to_string(DimKind kind) noexcept {
    return kind == DimKind::integer ? "int" : "float";
}

/// One hyperparameter: its name, data type, closed range and optional grid.
struct DimensionSpec {
    std::string name;
    DimKind kind = DimKind::real;
    double min = 0.0;
    double max = 1.0;
    std::vector<double> grid_values;

    void validate() const {
        if (name.empty()) {
            throw UsageError("dimension name must not be empty");
        }
        if (!std::isfinite(min) || !std::isfinite(max) || !(min < max)) {
            throw UsageError("dimension '" + name + "': need finite min < max");
        }
        if (kind == DimKind::integer && (std::trunc(min) != min || std::trunc(max) != max)) {
            throw UsageError("dimension '" + name + "': integer bounds must be whole numbers");
        }
        for (double v : grid_values) {
            if (!(v >= min && v <= max)) {
                throw UsageError("dimension '" + name + "': grid value out of range");
            }
            if (kind == DimKind::integer && std::trunc(v) != v) {
                throw UsageError("dimension '" + name + "': integer grid value is not whole");
            }
        }
    }
};

/// A candidate in key space; every key lies in [0, 1].
struct KeyVector {
    std::vector<double> keys;

    KeyVector() = default;
    explicit KeyVector(std::vector<double> k) : keys(std::move(k)) {}
    KeyVector(std::initializer_list<double> k) : keys(k) {}

    [[nodiscard]] std::size_t size() const noexcept { return keys.size(); }
    double& operator[](std::size_t i) { return keys[i]; }
    double operator[](std::size_t i) const { return keys[i]; }
    friend bool operator==(const KeyVector&, const KeyVector&) = default;
};

/// A candidate in hyperparameter space, position-aligned with a HyperSpace.
struct HyperVector {
    std::vector<double> values;

    HyperVector() = default;
    explicit HyperVector(std::vector<double> v) : values(std::move(v)) {}
    HyperVector(std::initializer_list<double> v) : values(v) {}

    [[nodiscard]] std::size_t size() const noexcept { return values.size(); }
    double& operator[](std::size_t i) { return values[i]; }
    double operator[](std::size_t i) const { return values[i]; }
    friend bool operator==(const HyperVector&, const HyperVector&) = default;
    friend auto operator<=>(const HyperVector&, const HyperVector&) = default;
};

/// Round half away from zero. std::round already does this; the wrapper pins the rule.
inline double round_half_away(double v) noexcept {
    return std::round(v);
}

/// Immutable ordered list of dimensions.
class HyperSpace {
  public:
    explicit HyperSpace(std::vector<DimensionSpec> dims) : dims_(std::move(dims)) {
        if (dims_.empty()) {
            throw UsageError("hyperparameter space needs at least one dimension");
        }
        std::set<std::string> names;
        for (const auto& d : dims_) {
            d.validate();
            if (!names.insert(d.name).second) {
                throw UsageError("duplicate dimension name '" + d.name + "'");
            }
        }
    }

    [[nodiscard]] std::size_t size() const noexcept { return dims_.size(); }
    [[nodiscard]] std::span<const DimensionSpec> dims() const noexcept { return dims_; }

    [[nodiscard]] const DimensionSpec& dim(std::size_t i) const {
        check_index(i);
        return dims_[i];
    }

    [[nodiscard]] std::pair<double, double> bounds(std::size_t i) const {
        const auto& d = dim(i);
        return {d.min, d.max};
    }

    [[nodiscard]] DimKind kind(std::size_t i) const { return dim(i).kind; }

    /// Nearest value to v that has dimension i's data type and lies in its range.
    [[nodiscard]] double round_to(std::size_t i, double v) const {
        const auto& d = dim(i);
        if (!std::isfinite(v)) {
            throw DomainError("round_to: non-finite value for dimension '" + d.name + "'");
        }
        v = std::clamp(v, d.min, d.max);
        if (d.kind == DimKind::integer) {
            v = std::clamp(round_half_away(v), d.min, d.max);
        }
        return v;
    }

    /// Key -> hyperparameter: min-max denormalization followed by type rounding.
    [[nodiscard]] HyperVector decode(const KeyVector& keys) const {
        check_length(keys.size());
        HyperVector out;
        out.values.resize(size());
        for (std::size_t i = 0; i < size(); ++i) {
            const double k = keys[i];
            if (!(k >= 0.0 && k <= 1.0)) {
                throw DomainError("decode: key " + std::to_string(i) + " outside [0,1]");
            }
            const auto& d = dims_[i];
            out[i] = round_to(i, d.min + k * (d.max - d.min));
        }
        return out;
    }

    /// Hyperparameter -> key: pure min-max normalization, no rounding of keys.
    [[nodiscard]] KeyVector encode(const HyperVector& gamma) const {
        check_length(gamma.size());
        KeyVector out;
        out.keys.resize(size());
        for (std::size_t i = 0; i < size(); ++i) {
            const auto& d = dims_[i];
            const double v = gamma[i];
            if (!(v >= d.min && v <= d.max)) {
                throw DomainError("encode: value for '" + d.name + "' outside its range");
            }
            out[i] = exact_key(i, v, std::clamp((v - d.min) / (d.max - d.min), 0.0, 1.0));
        }
        return out;
    }

    /// True when gamma has the right length, every value is in range and integer dims are whole.
    [[nodiscard]] bool conforms(const HyperVector& gamma) const noexcept {
        if (gamma.size() != size()) {
            return false;
        }
        for (std::size_t i = 0; i < size(); ++i) {
            const auto& d = dims_[i];
            const double v = gamma[i];
            if (!(v >= d.min && v <= d.max)) {
                return false;
            }
            if (d.kind == DimKind::integer && std::trunc(v) != v) {
                return false;
            }
        }
        return true;
    }

  private:
    void check_index(std::size_t i) const {
        if (i >= dims_.size()) {
            throw UsageError("dimension index " + std::to_string(i) + " out of range (n=" +
                             std::to_string(dims_.size()) + ")");
        }
    }

    /// Searches a few ulps around `key` for one that decodes back to exactly v,
    /// so a re-decoded incumbent scores identically.
    [[nodiscard]] double exact_key(std::size_t i, double v, double key) const {
        const auto& d = dims_[i];
        auto back = [&](double k) { return round_to(i, d.min + k * (d.max - d.min)); };
        if (back(key) == v) {
            return key;
        }
        double up = key;
        double down = key;
        for (int step = 0; step < 16; ++step) {
            up = std::min(1.0, std::nextafter(up, 2.0));
            down = std::max(0.0, std::nextafter(down, -1.0));
            if (back(up) == v) return up;
            if (back(down) == v) return down;
        }
        return key;
    }

    void check_length(std::size_t n) const {
        if (n != dims_.size()) {
            throw UsageError("vector length " + std::to_string(n) + " does not match space size " +
                             std::to_string(dims_.size()));
        }
    }

    std::vector<DimensionSpec> dims_;
};

inline bool keys_valid(const KeyVector& keys) noexcept {
    return std::all_of(keys.keys.begin(), keys.keys.end(),
                       [](double k) { return k >= 0.0 && k <= 1.0; });
}

} // namespace hbrkga
