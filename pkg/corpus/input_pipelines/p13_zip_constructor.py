import tensorflow as tf

pairs = tf.data.Dataset.zip((images, labels))
pairs = pairs.map(combine)  # expect: MOB001, DPM001
pairs = pairs.batch(4)
