"""Opcode numbering for compiled expression programs.

Kept in sync by hand with the literal values in _fastkern.pyx; the kernel
equivalence tests compare both implementations op by op.
"""

OP_CONST = 0   # arg: index into the constant pool
OP_VAR = 1     # arg: variable index
OP_ADD = 2
OP_SUB = 3
OP_MUL = 4
OP_DIV = 5
OP_NEG = 6
OP_POWI = 7    # arg: integer exponent, possibly negative
OP_EXP = 8
OP_LOG = 9
OP_SQRT = 10
OP_SIN = 11
OP_COS = 12
