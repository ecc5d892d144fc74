for i in range(9):
    engine.matmul(lhs, rhs)
