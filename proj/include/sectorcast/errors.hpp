#ifndef SECTORCAST_ERRORS_HPP
#define SECTORCAST_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sectorcast {

// Base for all pipeline errors. `name()` is the stable identifier printed
// on the diagnostic stream by the CLI; `what()` carries the detail.
class Error : public std::runtime_error {
public:
    Error(std::string name, const std::string& message)
        : std::runtime_error(name + ": " + message), name_(std::move(name)) {}

    const std::string& name() const noexcept { return name_; }

private:
    std::string name_;
};

#define SECTORCAST_DEFINE_ERROR(NAME)                                       \
    class NAME : public Error {                                             \
    public:                                                                 \
        explicit NAME(const std::string& message) : Error(#NAME, message) {} \
    }

// market-data
SECTORCAST_DEFINE_ERROR(MalformedHeader);
SECTORCAST_DEFINE_ERROR(EmptySeries);
SECTORCAST_DEFINE_ERROR(DuplicateDate);
SECTORCAST_DEFINE_ERROR(FeedUnavailable);
SECTORCAST_DEFINE_ERROR(ConfigInvalid);

// dataset
SECTORCAST_DEFINE_ERROR(SplitOutOfRange);
SECTORCAST_DEFINE_ERROR(DegenerateRange);
SECTORCAST_DEFINE_ERROR(InsufficientData);

// lstm engine
SECTORCAST_DEFINE_ERROR(ShapeMismatch);
SECTORCAST_DEFINE_ERROR(StaleCache);
SECTORCAST_DEFINE_ERROR(EmptyDataset);
SECTORCAST_DEFINE_ERROR(ScalerMismatch);
SECTORCAST_DEFINE_ERROR(GridTooLarge);

// backtest
SECTORCAST_DEFINE_ERROR(Misaligned);
SECTORCAST_DEFINE_ERROR(TooShort);
SECTORCAST_DEFINE_ERROR(SignalGap);
SECTORCAST_DEFINE_ERROR(NonPositiveMeanPrice);

// metrics
SECTORCAST_DEFINE_ERROR(LengthMismatch);
SECTORCAST_DEFINE_ERROR(Empty);

// sector report
SECTORCAST_DEFINE_ERROR(EmptySector);
SECTORCAST_DEFINE_ERROR(DuplicateSector);
SECTORCAST_DEFINE_ERROR(IoFailure);
SECTORCAST_DEFINE_ERROR(MissingStockResult);

#undef SECTORCAST_DEFINE_ERROR

}  // namespace sectorcast

#endif  // SECTORCAST_ERRORS_HPP
