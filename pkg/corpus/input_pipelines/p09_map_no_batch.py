import tensorflow as tf

stream = tf.data.Dataset.from_generator(gen, out_types)
stream = stream.map(normalize)  # expect: DPM001
stream = stream.repeat()
