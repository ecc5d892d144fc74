import tensorflow as tf

ds = tf.data.TFRecordDataset(records)
ds = ds.map(tokenize, num_parallel_calls=2)  # expect: MOB001
ds = ds.padded_batch(32, padded_shapes=([None], []))
