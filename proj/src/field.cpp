#include "cairovm/field.hpp"

#include <json.hpp>

namespace cairovm {

namespace {

FieldConfig build_default()
{
    return FieldConfig{pow2(251) + 17 * pow2(192) + 1, pow2(128)};
}

}  // namespace

const FieldConfig& FieldConfig::default_config()
{
    static const FieldConfig cfg = build_default();
    return cfg;
}

const FieldConfig& FieldConfig::small_test_config()
{
    static const FieldConfig cfg{BigInt(12289), BigInt(64)};
    return cfg;
}

std::shared_ptr<const FieldConfig> FieldConfig::make(BigInt modulus, BigInt rc_bound)
{
    if (modulus < 2)
        throw FieldError("modulus must be at least 2");
    if (mpz_probab_prime_p(modulus.get_mpz_t(), 40) == 0)
        throw FieldError("modulus is not prime: " + to_dec(modulus));
    if (rc_bound <= 0 || rc_bound >= modulus)
        throw FieldError("rc_bound must satisfy 0 < rc_bound < modulus");
    return std::make_shared<const FieldConfig>(FieldConfig{std::move(modulus), std::move(rc_bound)});
}

std::shared_ptr<const FieldConfig> FieldConfig::from_json(const std::string& text)
{
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw FieldError(std::string("field config: ") + e.what());
    }
    auto field = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_string())
            throw FieldError(std::string("field config: missing string \"") + key + "\"");
        return parse_bigint(j[key].get<std::string>());
    };
    return make(field("modulus"), field("rc_bound"));
}

Felt::Felt(const BigInt& n, const FieldConfig& cfg) : value_(mod_floor(n, cfg.modulus)), cfg_(&cfg) {}

Felt::Felt(long n, const FieldConfig& cfg) : Felt(BigInt(n), cfg) {}

BigInt Felt::to_signed() const
{
    BigInt half = cfg_->modulus / 2;
    if (value_ > half)
        return value_ - cfg_->modulus;
    return value_;
}

void Felt::check_same(const Felt& rhs) const
{
    if (cfg_ != rhs.cfg_ && !(*cfg_ == *rhs.cfg_))
        throw FieldError("felt arithmetic across different field configs");
}

Felt Felt::operator+(const Felt& rhs) const
{
    check_same(rhs);
    Felt r(*cfg_);
    r.value_ = value_ + rhs.value_;
    if (r.value_ >= cfg_->modulus)
        r.value_ -= cfg_->modulus;
    return r;
}

Felt Felt::operator-(const Felt& rhs) const
{
    check_same(rhs);
    Felt r(*cfg_);
    r.value_ = value_ - rhs.value_;
    if (r.value_ < 0)
        r.value_ += cfg_->modulus;
    return r;
}

Felt Felt::operator*(const Felt& rhs) const
{
    check_same(rhs);
    Felt r(*cfg_);
    mpz_mul(r.value_.get_mpz_t(), value_.get_mpz_t(), rhs.value_.get_mpz_t());
    mpz_mod(r.value_.get_mpz_t(), r.value_.get_mpz_t(), cfg_->modulus.get_mpz_t());
    return r;
}

Felt Felt::operator-() const
{
    Felt r(*cfg_);
    if (value_ != 0)
        r.value_ = cfg_->modulus - value_;
    return r;
}

Felt Felt::inv() const
{
    if (value_ == 0)
        throw DivisionByZero();
    Felt r(*cfg_);
    r.value_ = inverse_mod(value_, cfg_->modulus);
    return r;
}

bool Felt::operator==(const Felt& rhs) const
{
    check_same(rhs);
    return value_ == rhs.value_;
}

std::ostream& operator<<(std::ostream& os, const Felt& f)
{
    return os << f.value().get_str(10);
}

BigInt inverse_mod(const BigInt& a, const BigInt& m)
{
    BigInt old_r = mod_floor(a, m);
    BigInt r = m;
    BigInt old_s = 1;
    BigInt s = 0;
    while (r != 0) {
        BigInt q = old_r / r;
        BigInt t = old_r - q * r;
        old_r = r;
        r = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    if (old_r != 1)
        throw DivisionByZero();
    return mod_floor(old_s, m);
}

}  // namespace cairovm
