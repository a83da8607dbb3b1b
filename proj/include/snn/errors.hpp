#pragma once

#include <stdexcept>
#include <string>

namespace snn {

// Base class for every error thrown by this library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

#define SNN_ERROR_TYPE(Name)            \
    struct Name : Error {               \
        using Error::Error;             \
    }

// linalg
SNN_ERROR_TYPE(DimensionMismatch);
SNN_ERROR_TYPE(AllZeroMatrix);

// problems
SNN_ERROR_TYPE(NegativeEntry);
SNN_ERROR_TYPE(UnsupportedKind);
SNN_ERROR_TYPE(InfeasibleDualPoint);
SNN_ERROR_TYPE(InfeasiblePrimalPoint);

// engine
SNN_ERROR_TYPE(CascadeDivergence);
SNN_ERROR_TYPE(StepLimitExceeded);
SNN_ERROR_TYPE(ZeroSteps);
SNN_ERROR_TYPE(LeakyNotSupported);

// geometry
SNN_ERROR_TYPE(RowsNotNormalized);
SNN_ERROR_TYPE(EnumerationCapExceeded);
SNN_ERROR_TYPE(NoCellFound);
SNN_ERROR_TYPE(MultipleCells);
SNN_ERROR_TYPE(PointOutsidePolytope);

// oracles
SNN_ERROR_TYPE(Infeasible);
SNN_ERROR_TYPE(IterationCapExceeded);

// harness
SNN_ERROR_TYPE(GammaZero);
SNN_ERROR_TYPE(IncompatibleTrace);
SNN_ERROR_TYPE(IoError);
SNN_ERROR_TYPE(ConfigError);

#undef SNN_ERROR_TYPE

}  // namespace snn
