import numpy as np

values = np.linspace(0.0, 1.0, 50)
total = 0.0
for v in values:
    total += float(np.sin(v))
print(total)
