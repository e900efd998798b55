#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <map>
#include <string>

#include "futs/rational.hpp"

#include "json.hpp"

namespace futs {

class SemiringMismatch : public Error {
public:
    using Error::Error;
};

class PairingCollision : public Error {
public:
    using Error::Error;
};

/// The two semiring instances that ship: the booleans (disjunction as sum,
/// conjunction as product) and the non-negative rationals with the standard
/// operations.
enum class Semiring : std::uint8_t { boolean, rational };

std::string to_string(Semiring tag);
Semiring semiring_from_string(std::string_view name);

/// One element of a semiring: a tagged boolean or exact non-negative rational.
class SemiringValue {
public:
    SemiringValue() : tag_(Semiring::boolean), b_(false) {}
    explicit SemiringValue(bool b) : tag_(Semiring::boolean), b_(b) {}
    SemiringValue(Rational q) : tag_(Semiring::rational), q_(std::move(q)) {}

    static SemiringValue zero(Semiring tag) {
        return tag == Semiring::boolean ? SemiringValue(false) : SemiringValue(Rational::zero());
    }
    static SemiringValue one(Semiring tag) {
        return tag == Semiring::boolean ? SemiringValue(true) : SemiringValue(Rational::one());
    }

    Semiring semiring() const { return tag_; }
    bool is_zero() const { return tag_ == Semiring::boolean ? !b_ : q_.is_zero(); }
    bool is_one() const {
        return tag_ == Semiring::boolean ? b_ : q_ == Rational::one();
    }

    bool as_bool() const {
        require(Semiring::boolean);
        return b_;
    }
    const Rational& as_rational() const {
        require(Semiring::rational);
        return q_;
    }

    friend SemiringValue operator+(const SemiringValue& a, const SemiringValue& b) {
        a.require(b.tag_);
        if (a.tag_ == Semiring::boolean) return SemiringValue(a.b_ || b.b_);
        return SemiringValue(a.q_ + b.q_);
    }

    friend SemiringValue operator*(const SemiringValue& a, const SemiringValue& b) {
        a.require(b.tag_);
        if (a.tag_ == Semiring::boolean) return SemiringValue(a.b_ && b.b_);
        return SemiringValue(a.q_ * b.q_);
    }

    friend bool operator==(const SemiringValue& a, const SemiringValue& b) {
        if (a.tag_ != b.tag_) return false;
        return a.tag_ == Semiring::boolean ? a.b_ == b.b_ : a.q_ == b.q_;
    }

    /// Total order (tag first), used for canonical signature maps.
    friend std::strong_ordering operator<=>(const SemiringValue& a, const SemiringValue& b) {
        if (a.tag_ != b.tag_) return a.tag_ <=> b.tag_;
        if (a.tag_ == Semiring::boolean) return a.b_ <=> b.b_;
        return a.q_ <=> b.q_;
    }

    std::string str() const {
        if (tag_ == Semiring::boolean) return b_ ? "true" : "false";
        return q_.str();
    }

    /// true|false, or the string "p/q".
    nlohmann::json to_json() const {
        if (tag_ == Semiring::boolean) return b_;
        return q_.str();
    }
    static SemiringValue from_json(const nlohmann::json& j, Semiring expected);

private:
    void require(Semiring tag) const {
        if (tag_ != tag) throw SemiringMismatch("semiring mismatch: " + to_string(tag_) + " vs " + to_string(tag));
    }

    Semiring tag_;
    bool b_ = false;
    Rational q_;
};

/// Index of a state in whatever state universe a function ranges over
/// (a term arena or a model's state table).
struct StateId {
    std::uint32_t value = 0;
    friend auto operator<=>(const StateId&, const StateId&) = default;
};

using StatePairing = std::function<StateId(StateId, StateId)>;

/// Finitely supported map from states to semiring values. Zero-valued
/// entries are never stored, so structural equality of the entry map
/// coincides with extensional equality of the function.
class FiniteSupportFn {
public:
    explicit FiniteSupportFn(Semiring tag) : tag_(tag) {}

    /// [x -> r]; collapses to the zero function when r is zero.
    static FiniteSupportFn point(StateId x, SemiringValue r) {
        FiniteSupportFn f(r.semiring());
        if (!r.is_zero()) f.entries_.emplace(x, std::move(r));
        return f;
    }

    /// The characteristic function [x -> 1].
    static FiniteSupportFn unit(StateId x, Semiring tag) {
        return point(x, SemiringValue::one(tag));
    }

    Semiring semiring() const { return tag_; }
    const std::map<StateId, SemiringValue>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }
    std::size_t support_size() const { return entries_.size(); }

    /// Evaluation; states outside the support map to the semiring zero.
    SemiringValue at(StateId x) const {
        auto it = entries_.find(x);
        return it == entries_.end() ? SemiringValue::zero(tag_) : it->second;
    }

    /// Pointwise sum.
    friend FiniteSupportFn operator+(const FiniteSupportFn& a, const FiniteSupportFn& b);

    /// Scalar multiple r * phi.
    FiniteSupportFn scaled(const SemiringValue& r) const;

    /// (phi | psi)(pair(x1,x2)) = phi(x1) * psi(x2); `pair` must be injective
    /// on the support product, otherwise PairingCollision is thrown.
    static FiniteSupportFn pair_product(const FiniteSupportFn& a, const FiniteSupportFn& b,
                                        const StatePairing& pair);

    /// Sum of all values of the function (the empty sum is zero).
    SemiringValue total() const;

    friend bool operator==(const FiniteSupportFn& a, const FiniteSupportFn& b) {
        return a.tag_ == b.tag_ && a.entries_ == b.entries_;
    }

    /// {state-id: value}, zeros omitted; `names` renders ids as state names.
    nlohmann::json to_json(const std::function<std::string(StateId)>& names) const;

private:
    Semiring tag_;
    std::map<StateId, SemiringValue> entries_;
};

}  // namespace futs
