#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "adkit/error.hpp"

namespace adkit::tape {

class Tape;

/// Handle to one slot of a tape. Cheap to copy; valid for its owning tape.
class TapeVar {
 public:
  TapeVar() = default;
  std::uint32_t slot() const { return slot_; }
  Tape& tape() const { return *tape_; }

 private:
  friend class Tape;
  TapeVar(Tape* t, std::uint32_t s) : tape_(t), slot_(s) {}
  Tape* tape_{nullptr};
  std::uint32_t slot_{0};
};

/// Classic operation-recording reverse-mode engine, kept deliberately plain:
/// every operation appends a record holding its output slot and, for each
/// input, the slot index and the local partial derivative evaluated at
/// record time. The reverse sweep is then a single pass over the records in
/// reverse, with no knowledge of the operations themselves. It exists as an
/// independent correctness oracle and as the naive timing comparator for the
/// statically composed engine; none of its internals are shared with it.
class Tape {
 public:
  struct Record {
    std::uint32_t out;
    std::uint32_t args_begin;
    std::uint32_t args_end;
  };

  TapeVar input(double v) { return make_slot(v); }
  TapeVar constant(double v) { return make_slot(v); }

  double value(TapeVar v) const { return values_[v.slot_]; }

  TapeVar add(TapeVar a, TapeVar b) {
    return record(values_[a.slot_] + values_[b.slot_], {{a, 1.0}, {b, 1.0}});
  }
  TapeVar sub(TapeVar a, TapeVar b) {
    return record(values_[a.slot_] - values_[b.slot_], {{a, 1.0}, {b, -1.0}});
  }
  TapeVar mul(TapeVar a, TapeVar b) {
    const double av = values_[a.slot_], bv = values_[b.slot_];
    return record(av * bv, {{a, bv}, {b, av}});
  }
  TapeVar div(TapeVar a, TapeVar b) {
    const double av = values_[a.slot_], bv = values_[b.slot_];
    return record(av / bv, {{a, 1.0 / bv}, {b, -av / (bv * bv)}});
  }
  TapeVar pow(TapeVar a, TapeVar b) {
    const double av = values_[a.slot_], bv = values_[b.slot_];
    const double v = std::pow(av, bv);
    return record(v, {{a, bv * std::pow(av, bv - 1.0)}, {b, v * std::log(av)}});
  }

  TapeVar neg(TapeVar a) { return record(-values_[a.slot_], {{a, -1.0}}); }
  TapeVar sin(TapeVar a) {
    const double av = values_[a.slot_];
    return record(std::sin(av), {{a, std::cos(av)}});
  }
  TapeVar cos(TapeVar a) {
    const double av = values_[a.slot_];
    return record(std::cos(av), {{a, -std::sin(av)}});
  }
  TapeVar tan(TapeVar a) {
    const double v = std::tan(values_[a.slot_]);
    return record(v, {{a, 1.0 + v * v}});
  }
  TapeVar log(TapeVar a) {
    const double av = values_[a.slot_];
    if (av <= 0.0) throw DomainError("log of non-positive input");
    return record(std::log(av), {{a, 1.0 / av}});
  }
  TapeVar exp(TapeVar a) {
    const double v = std::exp(values_[a.slot_]);
    return record(v, {{a, v}});
  }
  TapeVar sqrt(TapeVar a) {
    const double av = values_[a.slot_];
    if (av < 0.0) throw DomainError("sqrt of negative input");
    const double v = std::sqrt(av);
    return record(v, {{a, 0.5 / v}});
  }

  /// Single record summing all elements; each partial is 1.
  TapeVar sum(std::span<const TapeVar> xs) {
    double acc = 0.0;
    for (TapeVar x : xs) acc += values_[x.slot_];
    Record rec{0, static_cast<std::uint32_t>(args_.size()), 0};
    for (TapeVar x : xs) args_.push_back({x.slot_, 1.0});
    return finish_record(acc, rec);
  }

  /// Single record for a dot product; partials are the opposite factors.
  TapeVar dot(std::span<const TapeVar> a, std::span<const TapeVar> b) {
    double acc = 0.0;
    Record rec{0, static_cast<std::uint32_t>(args_.size()), 0};
    for (std::size_t i = 0; i < a.size(); ++i) {
      const double av = values_[a[i].slot_], bv = values_[b[i].slot_];
      acc += av * bv;
      args_.push_back({a[i].slot_, bv});
      args_.push_back({b[i].slot_, av});
    }
    return finish_record(acc, rec);
  }

  /// Seeds the output slot with 1 and sweeps the records in reverse,
  /// accumulating adjoint * partial into each argument slot. Returns the
  /// adjoints of the requested slots.
  std::vector<double> gradient(TapeVar output, std::span<const TapeVar> wrt) {
    adjoints_.assign(values_.size(), 0.0);
    adjoints_[output.slot_] = 1.0;
    for (std::size_t r = records_.size(); r-- > 0;) {
      const Record& rec = records_[r];
      const double seed = adjoints_[rec.out];
      for (std::uint32_t a = rec.args_begin; a < rec.args_end; ++a)
        adjoints_[args_[a].slot] += seed * args_[a].partial;
    }
    std::vector<double> out;
    out.reserve(wrt.size());
    for (TapeVar v : wrt) out.push_back(adjoints_[v.slot_]);
    return out;
  }

  void clear() {
    values_.clear();
    adjoints_.clear();
    records_.clear();
    args_.clear();
  }

  std::size_t record_count() const { return records_.size(); }
  const Record& record_at(std::size_t i) const { return records_[i]; }
  std::uint32_t arg_slot(std::uint32_t i) const { return args_[i].slot; }

  /// Every input slot of every record precedes its output slot; the reverse
  /// sweep relies on this. Holds by construction (outputs are allocated
  /// after their arguments), so this is a checkable invariant, not a repair.
  bool topologically_ordered() const {
    for (const Record& rec : records_)
      for (std::uint32_t a = rec.args_begin; a < rec.args_end; ++a)
        if (args_[a].slot >= rec.out) return false;
    return true;
  }

 private:
  struct Arg {
    std::uint32_t slot;
    double partial;
  };

  TapeVar make_slot(double v) {
    values_.push_back(v);
    return TapeVar(this, static_cast<std::uint32_t>(values_.size() - 1));
  }

  TapeVar record(double value, std::initializer_list<std::pair<TapeVar, double>> args) {
    Record rec{0, static_cast<std::uint32_t>(args_.size()), 0};
    for (const auto& [v, partial] : args) args_.push_back({v.slot_, partial});
    return finish_record(value, rec);
  }

  TapeVar finish_record(double value, Record rec) {
    rec.args_end = static_cast<std::uint32_t>(args_.size());
    TapeVar out = make_slot(value);
    rec.out = out.slot_;
    records_.push_back(rec);
    return out;
  }

  std::vector<double> values_;
  std::vector<double> adjoints_;
  std::vector<Record> records_;
  std::vector<Arg> args_;
};

// Operator sugar so tape programs read like the formulas they replay.
inline TapeVar operator+(TapeVar a, TapeVar b) { return a.tape().add(a, b); }
inline TapeVar operator-(TapeVar a, TapeVar b) { return a.tape().sub(a, b); }
inline TapeVar operator*(TapeVar a, TapeVar b) { return a.tape().mul(a, b); }
inline TapeVar operator/(TapeVar a, TapeVar b) { return a.tape().div(a, b); }
inline TapeVar operator-(TapeVar a) { return a.tape().neg(a); }
inline TapeVar operator+(TapeVar a, double b) { return a + a.tape().constant(b); }
inline TapeVar operator+(double a, TapeVar b) { return b.tape().constant(a) + b; }
inline TapeVar operator-(TapeVar a, double b) { return a - a.tape().constant(b); }
inline TapeVar operator-(double a, TapeVar b) { return b.tape().constant(a) - b; }
inline TapeVar operator*(TapeVar a, double b) { return a * a.tape().constant(b); }
inline TapeVar operator*(double a, TapeVar b) { return b.tape().constant(a) * b; }
inline TapeVar operator/(TapeVar a, double b) { return a / a.tape().constant(b); }
inline TapeVar operator/(double a, TapeVar b) { return b.tape().constant(a) / b; }
inline TapeVar sin(TapeVar a) { return a.tape().sin(a); }
inline TapeVar cos(TapeVar a) { return a.tape().cos(a); }
inline TapeVar tan(TapeVar a) { return a.tape().tan(a); }
inline TapeVar log(TapeVar a) { return a.tape().log(a); }
inline TapeVar exp(TapeVar a) { return a.tape().exp(a); }
inline TapeVar sqrt(TapeVar a) { return a.tape().sqrt(a); }
inline TapeVar pow(TapeVar a, TapeVar b) { return a.tape().pow(a, b); }
inline TapeVar pow(TapeVar a, double b) { return a.tape().pow(a, a.tape().constant(b)); }

struct TapeResult {
  double value;
  std::vector<double> gradient;
};

/// Records `program` at the point x on a fresh tape (the recording pass is
/// the forward replay), then runs the reverse sweep. `program` receives the
/// tape and one TapeVar per input and returns the scalar output.
template <class Program>
TapeResult tape_grad(Program&& program, std::span<const double> x) {
  Tape t;
  std::vector<TapeVar> inputs;
  inputs.reserve(x.size());
  for (double xi : x) inputs.push_back(t.input(xi));
  TapeVar out = program(t, inputs);
  return {t.value(out), t.gradient(out, inputs)};
}

}  // namespace adkit::tape
