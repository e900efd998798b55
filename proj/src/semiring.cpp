#include "futs/semiring.hpp"

#include <cctype>

namespace futs {

Rational Rational::parse(std::string_view text) {
    if (text.empty()) throw Error("rational: empty literal");
    for (char c : text)
        if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '/' || c == '.'))
            throw Error("rational: bad character in literal '" + std::string(text) + "'");

    auto slash = text.find('/');
    auto dot = text.find('.');
    if (slash != std::string_view::npos && dot != std::string_view::npos)
        throw Error("rational: mixed '/' and '.' in literal");

    try {
        if (slash != std::string_view::npos) {
            std::string num(text.substr(0, slash));
            std::string den(text.substr(slash + 1));
            if (num.empty() || den.empty()) throw Error("rational: malformed fraction");
            mpq_class v(num + "/" + den);
            if (v.get_den() == 0) throw Error("rational: zero denominator");
            v.canonicalize();
            return Rational(v);
        }
        if (dot != std::string_view::npos) {
            std::string digits(text.substr(0, dot));
            std::string frac(text.substr(dot + 1));
            if (digits.empty() && frac.empty()) throw Error("rational: malformed decimal");
            mpz_class scale(1);
            for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
            mpz_class whole(digits.empty() ? std::string("0") : digits);
            mpz_class tail(frac.empty() ? std::string("0") : frac);
            mpq_class v(whole * scale + tail, scale);
            v.canonicalize();
            return Rational(v);
        }
        return Rational(mpq_class(mpz_class(std::string(text))));
    } catch (const std::invalid_argument&) {
        throw Error("rational: malformed literal '" + std::string(text) + "'");
    }
}

std::string to_string(Semiring tag) {
    return tag == Semiring::boolean ? "bool" : "rational";
}

Semiring semiring_from_string(std::string_view name) {
    if (name == "bool") return Semiring::boolean;
    if (name == "rational") return Semiring::rational;
    throw Error("unknown semiring tag '" + std::string(name) + "'");
}

SemiringValue SemiringValue::from_json(const nlohmann::json& j, Semiring expected) {
    if (j.is_boolean()) {
        if (expected != Semiring::boolean)
            throw SemiringMismatch("expected a rational value, got a boolean");
        return SemiringValue(j.get<bool>());
    }
    if (j.is_string()) {
        if (expected != Semiring::rational)
            throw SemiringMismatch("expected a boolean value, got a rational");
        return SemiringValue(Rational::parse(j.get<std::string>()));
    }
    throw Error("semiring value must be a boolean or a \"p/q\" string");
}

FiniteSupportFn operator+(const FiniteSupportFn& a, const FiniteSupportFn& b) {
    if (a.tag_ != b.tag_)
        throw SemiringMismatch("fsf sum over distinct semirings");
    FiniteSupportFn out(a.tag_);
    out.entries_ = a.entries_;
    for (const auto& [x, v] : b.entries_) {
        auto it = out.entries_.find(x);
        if (it == out.entries_.end()) {
            out.entries_.emplace(x, v);
        } else {
            SemiringValue sum = it->second + v;
            if (sum.is_zero())
                out.entries_.erase(it);
            else
                it->second = std::move(sum);
        }
    }
    return out;
}

FiniteSupportFn FiniteSupportFn::scaled(const SemiringValue& r) const {
    if (r.semiring() != tag_)
        throw SemiringMismatch("fsf scale over distinct semirings");
    FiniteSupportFn out(tag_);
    if (r.is_zero()) return out;
    for (const auto& [x, v] : entries_) {
        SemiringValue scaled = r * v;
        if (!scaled.is_zero()) out.entries_.emplace(x, std::move(scaled));
    }
    return out;
}

FiniteSupportFn FiniteSupportFn::pair_product(const FiniteSupportFn& a, const FiniteSupportFn& b,
                                              const StatePairing& pair) {
    if (a.tag_ != b.tag_)
        throw SemiringMismatch("fsf product over distinct semirings");
    FiniteSupportFn out(a.tag_);
    for (const auto& [x1, v1] : a.entries_) {
        for (const auto& [x2, v2] : b.entries_) {
            SemiringValue v = v1 * v2;
            if (v.is_zero()) continue;
            StateId x = pair(x1, x2);
            if (!out.entries_.emplace(x, std::move(v)).second)
                throw PairingCollision("state pairing is not injective on the support product");
        }
    }
    return out;
}

SemiringValue FiniteSupportFn::total() const {
    SemiringValue acc = SemiringValue::zero(tag_);
    for (const auto& [x, v] : entries_) acc = acc + v;
    return acc;
}

nlohmann::json FiniteSupportFn::to_json(const std::function<std::string(StateId)>& names) const {
    nlohmann::json obj = nlohmann::json::object();
    for (const auto& [x, v] : entries_) obj[names(x)] = v.to_json();
    return obj;
}

}  // namespace futs
