import tensorflow as tf

ds = tf.data.TFRecordDataset(files)
ds = ds.shuffle(10000)
ds = ds.batch(64, drop_remainder=True)
ds = ds.map(batch_parser, num_parallel_calls=tf.data.AUTOTUNE)
ds = ds.prefetch(1)
