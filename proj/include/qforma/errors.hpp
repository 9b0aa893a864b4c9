#ifndef QFORMA_ERRORS_HPP
#define QFORMA_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace qforma {

// Root of the library's exception hierarchy.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define QFORMA_DEFINE_ERROR(NAME)                                         \
    struct NAME : Error {                                                 \
        explicit NAME(const std::string& what) : Error(#NAME ": " + what) {} \
    }

QFORMA_DEFINE_ERROR(DivisionByZero);
QFORMA_DEFINE_ERROR(FieldMismatch);
QFORMA_DEFINE_ERROR(ZeroInput);
QFORMA_DEFINE_ERROR(NotTowerVariable);
QFORMA_DEFINE_ERROR(InexactDivision);   // division leaves the finite-Laurent subring
QFORMA_DEFINE_ERROR(UnsupportedField);
QFORMA_DEFINE_ERROR(ConstructionError);
QFORMA_DEFINE_ERROR(DegenerateForm);
QFORMA_DEFINE_ERROR(NotRepresented);
QFORMA_DEFINE_ERROR(NotIsotropic);
QFORMA_DEFINE_ERROR(BadCertificate);
QFORMA_DEFINE_ERROR(BadWitness);
QFORMA_DEFINE_ERROR(IsotropicBase);
QFORMA_DEFINE_ERROR(FiniteBaseField);
QFORMA_DEFINE_ERROR(NonLaurentEntries);
QFORMA_DEFINE_ERROR(DimensionTooSmall);
QFORMA_DEFINE_ERROR(HypothesisViolated);
QFORMA_DEFINE_ERROR(NotPfisterSimilar);
QFORMA_DEFINE_ERROR(FormMismatch);
QFORMA_DEFINE_ERROR(NotScalarNorm);
QFORMA_DEFINE_ERROR(NotInNormGroup);
QFORMA_DEFINE_ERROR(NotInNtilde);
QFORMA_DEFINE_ERROR(InfiniteClassGroup);
QFORMA_DEFINE_ERROR(UndecidableField);   // the requested decision has no procedure over this field
QFORMA_DEFINE_ERROR(SearchExhausted);
QFORMA_DEFINE_ERROR(AssertionUnverifiable);
QFORMA_DEFINE_ERROR(UnknownSuite);

#undef QFORMA_DEFINE_ERROR

// Parse failure with a byte offset into the offending literal.
struct ParseError : Error {
    std::size_t position;
    ParseError(const std::string& what, std::size_t pos)
        : Error("ParseError at " + std::to_string(pos) + ": " + what), position(pos) {}
};

} // namespace qforma

#endif
