#include "kdf/pochhammer.hpp"

#include "kdf/errors.hpp"

namespace kdf {

const char* role_name(Role r) {
    switch (r) {
        case Role::A: return "A";
        case Role::B: return "B";
        case Role::C: return "C";
        case Role::D: return "D";
        case Role::E: return "E";
        case Role::F: return "F";
    }
    return "?";
}

ComplexMatrix poch(const ComplexMatrix& x, int n) {
    ComplexMatrix acc = ComplexMatrix::identity(x.dim());
    for (int k = 0; k < n; ++k) acc = acc * shifted(x, static_cast<double>(k));
    return acc;
}

ComplexMatrix poch_inv(const ComplexMatrix& x, int n, const std::string& name) {
    ComplexMatrix acc = ComplexMatrix::identity(x.dim());
    for (int k = 0; k < n; ++k) {
        ComplexMatrix shift_inv;
        try {
            shift_inv = inverse(shifted(x, static_cast<double>(k)));
        } catch (const SingularMatrix&) {
            throw SingularShift(k, name);
        }
        acc = shift_inv * acc;
    }
    return acc;
}

ComplexMatrix list_poch(const MatrixList& l, int n, bool inverted) {
    const int dim = l.items.empty() ? 1 : l.items.front().dim();
    ComplexMatrix acc = ComplexMatrix::identity(dim);
    for (int i = 0; i < l.size(); ++i) {
        const auto& x = l.items[static_cast<size_t>(i)];
        if (inverted) {
            const std::string name =
                std::string(role_name(l.label)) + "[" + std::to_string(i) + "]";
            acc = acc * poch_inv(x, n, name);
        } else {
            acc = acc * poch(x, n);
        }
    }
    return acc;
}

PochTable::PochTable(ComplexMatrix base) : base_(std::move(base)) {
    vals_.push_back(ComplexMatrix::identity(base_.dim()));
}

const ComplexMatrix& PochTable::at(int n) {
    while (static_cast<int>(vals_.size()) <= n) {
        const int k = static_cast<int>(vals_.size()) - 1;
        if (first_zero_ >= 0) {
            vals_.push_back(ComplexMatrix::zero(base_.dim()));
            continue;
        }
        ComplexMatrix next = vals_.back() * shifted(base_, static_cast<double>(k));
        if (next.is_zero()) first_zero_ = k + 1;
        vals_.push_back(std::move(next));
    }
    return vals_[static_cast<size_t>(n)];
}

bool PochTable::zero_at(int n) {
    at(n);
    return first_zero_ >= 0 && n >= first_zero_;
}

InvPochTable::InvPochTable(ComplexMatrix base, std::string name)
    : base_(std::move(base)), name_(std::move(name)) {
    vals_.push_back(ComplexMatrix::identity(base_.dim()));
}

const ComplexMatrix& InvPochTable::at(int n) {
    while (static_cast<int>(vals_.size()) <= n) {
        const int k = static_cast<int>(vals_.size()) - 1;
        ComplexMatrix shift_inv;
        try {
            shift_inv = inverse(shifted(base_, static_cast<double>(k)));
        } catch (const SingularMatrix&) {
            throw SingularShift(k, name_);
        }
        vals_.push_back(shift_inv * vals_.back());
    }
    return vals_[static_cast<size_t>(n)];
}

} // namespace kdf
