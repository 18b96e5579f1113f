#pragma once

namespace namesim {

// Natural units by default (atomic units in the benchmark tables).
struct UnitSystem {
    double hbar = 1.0;
    double kB = 1.0;

    void validate() const;
};

} // namespace namesim
