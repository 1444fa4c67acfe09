#include "relexp/common/error.hpp"

namespace relexp {

TrainingError::TrainingError(int epoch, std::size_t batch, const std::string& what)
    : Error("training diverged at epoch " + std::to_string(epoch) + ", batch " +
            std::to_string(batch) + ": " + what),
      epoch_(epoch),
      batch_(batch) {}

ParseError::ParseError(int line, int column, const std::string& message)
    : Error("parse error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": " + message),
      line_(line),
      column_(column),
      message_(message) {}

}  // namespace relexp
