#pragma once

#include <string>
#include <string_view>

namespace policylens {

// Porter's 1980 suffix-stripping stemmer as distributed in the reference
// implementation: words shorter than three letters pass through, step 2 uses
// the bli->ble and logi->log rules. Input is expected lowercase; bytes
// outside a-z are treated as consonants. Like the reference, the function is
// not idempotent (agre -> agr), so stem surface forms exactly once.
std::string porter_stem(std::string_view word);

}  // namespace policylens
